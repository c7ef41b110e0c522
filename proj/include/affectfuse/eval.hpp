#pragma once

// Leave-one-session-out evaluation of the fused per-modality LDA classifier,
// plus accuracy, per-class TPR/FPR and misclassification-rate (MSCR) metrics.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "affectfuse/core.hpp"
#include "affectfuse/dsp.hpp"
#include "affectfuse/error.hpp"
#include "affectfuse/features.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/io.hpp"
#include "affectfuse/lda.hpp"
#include "affectfuse/selection.hpp"

namespace affectfuse::eval {

struct EvalConfig {
  bool prune = false;
  double threshold = selection::kDefaultThreshold;
  lda::LdaOptions lda{};
  dsp::CutoffConfig cutoffs{};
  std::size_t entropy_bins = features::kDefaultEntropyBins;
  bool parallel = true;
  std::uint64_t seed = 0;  ///< echoed only; evaluation itself draws no random numbers
};

/// Preprocessed feature table plus the filter plan that produced it.
struct PreparedData {
  dsp::PreprocessPlan plan;
  features::FeatureTable table;
  std::vector<std::string> session_ids;
};

/// Preprocess every session (per-session scaling) and extract features.
inline PreparedData prepare(std::span<const Session> sessions, const EvalConfig& cfg) {
  if (sessions.empty()) throw IngestError("no sessions");
  const double fs = sessions.front().fs_hz();
  for (const auto& s : sessions) {
    if (s.fs_hz() != fs) throw IngestError("session " + s.id() + ": sampling rate differs");
  }
  PreparedData out;
  out.plan = dsp::make_plan(fs, cfg.cutoffs);
  for (const auto& s : sessions) {
    const auto processed = dsp::preprocess(s, out.plan);
    auto rows = features::session_rows(processed, cfg.entropy_bins);
    out.table.rows.insert(out.table.rows.end(), rows.begin(), rows.end());
    out.session_ids.push_back(s.id());
  }
  return out;
}

/// The three modality learners of one fold and the columns routed to each.
struct FoldModels {
  selection::FeatureMask mask;
  std::array<std::vector<FeatureIndex>, kChannelCount> routes;
  std::array<lda::LdaModel, kChannelCount> models;

  friend bool operator==(const FoldModels&, const FoldModels&) = default;
};

inline std::vector<double> project(const features::FeatureRow& row,
                                   std::span<const FeatureIndex> cols) {
  std::vector<double> x;
  x.reserve(cols.size());
  for (auto idx : cols) x.push_back(row.values[idx.value()]);
  return x;
}

/// Fit mask and models on the given training rows only.
inline FoldModels train(std::span<const features::FeatureRow> training, const EvalConfig& cfg) {
  FoldModels fm;
  fm.mask = cfg.prune ? selection::prune_correlated(training, cfg.threshold)
                      : selection::keep_varying(training);
  for (ChannelKind c : kChannels) {
    const std::size_t r = index_of(c);
    fm.routes[r] = fm.mask.for_channel(c);
    lda::TrainingSet ts;
    ts.x.reserve(training.size());
    ts.labels.reserve(training.size());
    for (const auto& row : training) {
      ts.x.push_back(project(row, fm.routes[r]));
      ts.labels.push_back(slot_of(row.emotion));
    }
    fm.models[r] = lda::fit_lda(ts, kEmotionCount, cfg.lda);
  }
  return fm;
}

inline std::vector<features::FeatureRow> rows_excluding(const features::FeatureTable& table,
                                                        const std::string& held_out) {
  std::vector<features::FeatureRow> out;
  for (const auto& r : table.rows) if (r.session_id != held_out) out.push_back(r);
  return out;
}

/// Train on every session except `held_out`.
inline FoldModels train_fold(const features::FeatureTable& table, const std::string& held_out,
                             const EvalConfig& cfg) {
  const auto training = rows_excluding(table, held_out);
  return train(training, cfg);
}

struct Prediction {
  Emotion truth = Emotion::no_emotion;
  fusion::LikelihoodWeightMatrix matrix{};
  fusion::FusedDecision decision;
};

inline Prediction predict(const FoldModels& fm, const features::FeatureRow& row) {
  Prediction p;
  p.truth = row.emotion;
  for (ChannelKind c : kChannels) {
    const std::size_t r = index_of(c);
    const auto g = lda::discriminants(fm.models[r], project(row, fm.routes[r]));
    const auto w = lda::weight_vector(g);
    std::copy(w.begin(), w.end(), p.matrix[r].begin());
  }
  p.decision = fusion::fuse(p.matrix);
  return p;
}

using ConfusionMatrix = std::array<std::array<std::size_t, kEmotionCount>, kEmotionCount>;

struct Metrics {
  ConfusionMatrix confusion{};  ///< [truth][predicted] counts
  std::size_t total = 0;
  double accuracy = 0.0;
  std::array<double, kEmotionCount> tpr{};
  std::array<double, kEmotionCount> fpr{};
  std::array<std::array<double, kEmotionCount>, kEmotionCount> mscr{};  ///< diagonal zero
};

struct Outcome {
  Emotion truth;
  Emotion predicted;
};

/// Metrics from integer confusion counts. Every emotion must occur as truth.
inline Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
  Metrics m;
  m.confusion = cm;
  std::array<std::size_t, kEmotionCount> truth_count{}, pred_count{};
  std::size_t correct = 0;
  for (std::size_t t = 0; t < kEmotionCount; ++t) {
    for (std::size_t p = 0; p < kEmotionCount; ++p) {
      truth_count[t] += cm[t][p];
      pred_count[p] += cm[t][p];
      m.total += cm[t][p];
    }
    correct += cm[t][t];
  }
  if (m.total == 0) throw ContractError("metrics: no predictions");
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    if (truth_count[e] == 0) {
      throw ContractError("metrics: emotion " + std::to_string(e + 1) + " never occurs as truth");
    }
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    const double n_e = static_cast<double>(truth_count[e]);
    m.tpr[e] = static_cast<double>(cm[e][e]) / n_e;
    const std::size_t negatives = m.total - truth_count[e];
    const std::size_t false_pos = pred_count[e] - cm[e][e];
    m.fpr[e] = negatives == 0 ? 0.0
                              : static_cast<double>(false_pos) / static_cast<double>(negatives);
    for (std::size_t j = 0; j < kEmotionCount; ++j) {
      m.mscr[e][j] = j == e ? 0.0 : static_cast<double>(cm[e][j]) / n_e;
    }
  }
  return m;
}

inline Metrics metrics(std::span<const Outcome> outcomes) {
  ConfusionMatrix cm{};
  for (const auto& o : outcomes) {
    if (!is_class(o.truth) || !is_class(o.predicted)) {
      throw ContractError("metrics: outcome outside emotion ids 1..8");
    }
    ++cm[slot_of(o.truth)][slot_of(o.predicted)];
  }
  return metrics_from_confusion(cm);
}

struct FoldResult {
  std::string held_out_session;
  selection::FeatureMask mask;
  std::vector<Prediction> predictions;  ///< one per emotion, in emotion order
  double accuracy = 0.0;
};

struct EvalReport {
  EvalConfig config;
  std::array<dsp::FilterDesign, kChannelCount> filters{};
  std::vector<std::string> session_files;  ///< as listed in the manifest, if any
  std::vector<FoldResult> folds;
  Metrics metrics;
};

namespace detail {

template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
  const std::size_t workers =
      parallel ? std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency())) : 1;
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
  }
  for (auto& e : errors) if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Leave-one-session-out over an already prepared table.
inline EvalReport run_loocv(const PreparedData& data, const EvalConfig& cfg) {
  if (data.session_ids.size() < 2) throw IngestError("run_loocv: need at least 2 sessions");
  EvalReport report;
  report.config = cfg;
  report.filters = data.plan.designs;
  report.folds.resize(data.session_ids.size());

  detail::for_each_index(data.session_ids.size(), cfg.parallel, [&](std::size_t f) {
    const std::string& held = data.session_ids[f];
    const auto models = train_fold(data.table, held, cfg);
    FoldResult& fr = report.folds[f];
    fr.held_out_session = held;
    fr.mask = models.mask;
    std::size_t correct = 0;
    for (const auto& row : data.table.rows) {
      if (row.session_id != held) continue;
      fr.predictions.push_back(predict(models, row));
      if (fr.predictions.back().decision.predicted == row.emotion) ++correct;
    }
    fr.accuracy = static_cast<double>(correct) / static_cast<double>(fr.predictions.size());
  });

  ConfusionMatrix cm{};
  for (const auto& fr : report.folds) {
    for (const auto& p : fr.predictions) ++cm[slot_of(p.truth)][slot_of(p.decision.predicted)];
  }
  report.metrics = metrics_from_confusion(cm);
  return report;
}

inline EvalReport run_loocv(std::span<const Session> sessions, const EvalConfig& cfg) {
  return run_loocv(prepare(sessions, cfg), cfg);
}

inline EvalReport run_loocv(const io::Manifest& manifest, const EvalConfig& cfg) {
  const auto sessions = io::load_sessions(manifest);
  auto report = run_loocv(std::span<const Session>(sessions), cfg);
  report.session_files = manifest.sessions;
  return report;
}

}  // namespace affectfuse::eval
