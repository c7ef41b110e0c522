#pragma once

// JSON and CSV emission for evaluation reports, feature tables and fitted models.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "affectfuse/core.hpp"
#include "affectfuse/eval.hpp"
#include "affectfuse/features.hpp"
#include "affectfuse/io.hpp"
#include "affectfuse/lda.hpp"

namespace affectfuse::report {

using nlohmann::json;

inline json kept_indices(const selection::FeatureMask& mask) {
  json arr = json::array();
  for (auto idx : mask.kept) arr.push_back(idx.value());
  return arr;
}

inline json filter_json(const dsp::FilterDesign& d) {
  return json{{"requested_hz", d.requested_cutoff_hz},
              {"effective_hz", d.effective_cutoff_hz},
              {"clamped", d.clamped},
              {"b", d.coeffs.b},
              {"a", d.coeffs.a}};
}

inline json config_json(const eval::EvalConfig& cfg,
                        const std::array<dsp::FilterDesign, kChannelCount>& filters) {
  json cutoffs = json::object();
  for (ChannelKind c : kChannels) {
    cutoffs[std::string(name_of(c))] = filter_json(filters[index_of(c)]);
  }
  return json{{"prune", cfg.prune},
              {"threshold", cfg.threshold},
              {"shrinkage", cfg.lda.shrinkage},
              {"ridge", cfg.lda.ridge},
              {"entropy_bins", cfg.entropy_bins},
              {"filter_order", cfg.cutoffs.order},
              {"filters", cutoffs},
              {"parallel", cfg.parallel},
              {"seed", cfg.seed}};
}

inline json to_json(const eval::EvalReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    json preds = json::array();
    for (const auto& p : f.predictions) {
      json matrix = json::array();
      for (const auto& row : p.matrix) matrix.push_back(row);
      preds.push_back(json{{"truth", id_of(p.truth)},
                           {"predicted", id_of(p.decision.predicted)},
                           {"mean_weights", p.decision.mean_weights},
                           {"matrix", matrix}});
    }
    folds.push_back(json{{"held_out", f.held_out_session},
                         {"accuracy", f.accuracy},
                         {"mask", kept_indices(f.mask)},
                         {"kept_count", f.mask.kept.size()},
                         {"predictions", preds}});
  }
  const auto& m = r.metrics;
  json confusion = json::array(), mscr = json::array();
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    confusion.push_back(m.confusion[e]);
    mscr.push_back(m.mscr[e]);
  }
  return json{{"config", config_json(r.config, r.filters)},
              {"sessions", r.session_files},
              {"total_predictions", m.total},
              {"accuracy", m.accuracy},
              {"tpr", m.tpr},
              {"fpr", m.fpr},
              {"mscr", mscr},
              {"confusion", confusion},
              {"folds", folds}};
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IngestError("cannot open " + p.string() + " for writing");
  return os;
}

}  // namespace detail

/// report.json, confusion.csv, rates.csv, mscr.csv and roc_points.csv under `dir`.
inline void write_report(const std::filesystem::path& dir, const eval::EvalReport& r) {
  std::filesystem::create_directories(dir);
  const auto& m = r.metrics;
  {
    auto os = detail::open_out(dir / "report.json");
    os << to_json(r).dump(2) << '\n';
  }
  auto header = [](std::ostream& os, const char* first) {
    os << first;
    for (std::size_t e = 1; e <= kEmotionCount; ++e) os << ",e" << e;
    os << '\n';
  };
  {
    auto os = detail::open_out(dir / "confusion.csv");
    header(os, "truth");
    for (std::size_t t = 0; t < kEmotionCount; ++t) {
      os << t + 1;
      for (auto c : m.confusion[t]) os << ',' << c;
      os << '\n';
    }
  }
  {
    auto os = detail::open_out(dir / "rates.csv");
    os << "emotion,tpr,fpr\n";
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      os << e + 1 << ',' << io::format_double(m.tpr[e]) << ',' << io::format_double(m.fpr[e])
         << '\n';
    }
  }
  {
    auto os = detail::open_out(dir / "mscr.csv");
    header(os, "target");
    for (std::size_t t = 0; t < kEmotionCount; ++t) {
      os << t + 1;
      for (double v : m.mscr[t]) os << ',' << io::format_double(v);
      os << '\n';
    }
  }
  {
    // One pooled (fpr, tpr) point per emotion.
    auto os = detail::open_out(dir / "roc_points.csv");
    os << "emotion,name,source,fpr,tpr\n";
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      const auto name = name_of(emotion_from_slot(e));
      os << e + 1 << ',' << name << ",pooled," << io::format_double(m.fpr[e]) << ','
         << io::format_double(m.tpr[e]) << '\n';
    }
  }
}

inline void write_features_csv(std::ostream& os, const features::FeatureTable& table) {
  os << "session,emotion";
  char buf[8];
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    std::snprintf(buf, sizeof(buf), ",f%02zu", j);
    os << buf;
  }
  os << '\n';
  std::string line;
  for (const auto& row : table.rows) {
    line = row.session_id + ',' + std::to_string(id_of(row.emotion));
    for (double v : row.values) {
      line += ',';
      io::append_double(line, v);
    }
    line += '\n';
    os << line;
  }
}

inline json model_json(const lda::LdaModel& m) {
  auto rows = [](const lda::Matrix& mat) {
    json out = json::array();
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      auto row = mat.row(r);
      out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
  };
  return json{{"dim", m.dim},
              {"means", rows(m.means)},
              {"covariance", rows(m.covariance)},
              {"priors", m.priors},
              {"weights", rows(m.weights)},
              {"biases", m.biases}};
}

inline json fold_models_json(const eval::FoldModels& fm) {
  json modalities = json::object();
  for (ChannelKind c : kChannels) {
    json features = json::array();
    for (auto idx : fm.routes[index_of(c)]) features.push_back(idx.value());
    json entry = model_json(fm.models[index_of(c)]);
    entry["features"] = features;
    modalities[std::string(name_of(c))] = entry;
  }
  return json{{"mask", kept_indices(fm.mask)},
              {"threshold", fm.mask.threshold},
              {"modalities", modalities}};
}

}  // namespace affectfuse::report
