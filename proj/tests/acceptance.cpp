// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: affectfuse_acceptance <path-to-affectfuse-cli> <scratch-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "affectfuse.hpp"
#include "oracles.hpp"

using namespace affectfuse;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scratch;

class Failures {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) list_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return list_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    const auto& src = list_.empty() ? notes_ : list_;
    for (std::size_t i = 0; i < src.size() && i < 4; ++i) os << (i ? "; " : "") << src[i];
    if (src.size() > 4) os << "; +" << src.size() - 4 << " more";
    return os.str();
  }

 private:
  std::vector<std::string> list_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

std::vector<Session> dataset(std::uint64_t seed, double separation, std::size_t days = 20) {
  synth::SynthConfig cfg;
  cfg.days = days;
  cfg.seed = seed;
  cfg.separation = separation;
  return synth::generate(cfg);
}

// Shared between criteria 6 and 7.
std::vector<eval::EvalReport> g_reports;

// 1. Filter design, zero-phase oracle agreement, zero lag.
void dsp_correctness(Failures& f) {
  auto d = dsp::design_lowpass_butterworth(1, 5.0, 20.0).coeffs;
  f.check(d.b.size() == 2 && d.a.size() == 2, "order-1 design has two taps");
  f.check(std::abs(d.b[0] - 0.5) <= 1e-12 && std::abs(d.b[1] - 0.5) <= 1e-12 &&
              std::abs(d.a[0] - 1.0) <= 1e-12 && std::abs(d.a[1]) <= 1e-12,
          "Wn=0.5 coefficients");

  double worst = 0.0;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> order(1, 4);
  std::uniform_real_distribution<double> cut(0.3, 9.0);
  std::uniform_int_distribution<std::size_t> len(40, 600);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto c = dsp::design_lowpass_butterworth(order(rng), cut(rng), 20.0).coeffs;
    auto x = oracle::gaussian(len(rng), 1000 + s);
    auto got = dsp::zero_phase_filter(c, x);
    auto want = oracle::naive_filtfilt(c.b, c.a, x);
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  f.check(worst <= 1e-9, "oracle max diff " + fmt(worst));
  f.note("oracle max diff " + fmt(worst, 3));

  std::vector<double> sine(2000);
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2.0 * std::numbers::pi * 0.05 * i);
  for (double fc : {2.0, 5.0, 9.5}) {
    auto c = dsp::design_lowpass_butterworth(2, fc, 20.0).coeffs;
    const int lag = oracle::best_lag(sine, dsp::zero_phase_filter(c, sine), 20);
    f.check(lag == 0, "lag " + std::to_string(lag) + " at fc=" + fmt(fc));
  }
}

// 2. Hand-derived feature vector, Parseval, Gaussian kurtosis.
void feature_oracles(Failures& f) {
  const std::size_t n = 400;
  std::vector<double> alt(n);
  for (std::size_t i = 0; i < n; ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
  auto v = features::extract_features(alt, 20.0);
  const features::FeatureVector want{1, -1, n / 2.0 - 1, 0, 1, 1, std::log(2.0), 1, 1};
  for (std::size_t k = 0; k < want.size(); ++k) {
    f.check(std::abs(v[k] - want[k]) <= 1e-12, "alternating feature " + std::to_string(k));
  }

  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto x = oracle::gaussian(200 + 7 * s, 500 + s, 0.5);
    for (auto& e : x) e += 0.3;
    auto p = features::powers(x);
    const double mean = features::moments(x).mean;
    worst = std::max(worst, std::abs(p.spectral - (p.signal - mean * mean)));
  }
  f.check(worst <= 1e-9, "Parseval max diff " + fmt(worst));

  const double k = features::moments(oracle::gaussian(1'000'000, 31337)).kurtosis;
  f.check(std::abs(k - 3.0) <= 0.1, "kurtosis " + fmt(k));
  f.note("Parseval max diff " + fmt(worst, 3) + ", kurtosis " + fmt(k, 5));
}

std::vector<double> column(std::span<const features::FeatureRow> rows, std::size_t j) {
  std::vector<double> c;
  for (const auto& r : rows) c.push_back(r.values[j]);
  return c;
}

// 3. Every fold's kept set is pairwise |r| <= 0.8; duplicate fixture gives 18.
void pruning_contract(Failures& f) {
  eval::EvalConfig cfg;
  cfg.prune = true;
  std::size_t folds = 0, pairs = 0;
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u}) {
    for (double sep : {0.0, 2.0}) {
      auto sessions = dataset(seed, sep);
      auto data = eval::prepare(sessions, cfg);
      auto rep = eval::run_loocv(data, cfg);
      for (const auto& fold : rep.folds) {
        auto training = eval::rows_excluding(data.table, fold.held_out_session);
        f.check(fold.mask == selection::prune_correlated(training, cfg.threshold),
                "fold mask differs from training-row pruning");
        const auto& kept = fold.mask.kept;
        for (std::size_t a = 0; a < kept.size(); ++a) {
          for (std::size_t b = a + 1; b < kept.size(); ++b) {
            const double r = std::abs(oracle::correlation(column(training, kept[a].value()),
                                                          column(training, kept[b].value())));
            worst = std::max(worst, r);
            ++pairs;
          }
        }
        ++folds;
      }
    }
  }
  f.check(worst <= 0.8, "kept pair |r| " + fmt(worst));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  std::vector<features::FeatureRow> rows(152);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].emotion = emotion_from_slot(i % 8);
    for (auto& v : rows[i].values) v = d(rng);
    for (std::size_t base : {0u, 9u, 18u}) {
      for (std::size_t k = 0; k < 3; ++k) rows[i].values[base + 3 + k] = rows[i].values[base + k];
    }
  }
  const auto kept = selection::prune_correlated(rows, 0.8).kept.size();
  f.check(kept == 18, "fixture kept " + std::to_string(kept));
  f.note(std::to_string(folds) + " folds, " + std::to_string(pairs) + " pairs, max |r| " +
         fmt(worst, 3) + ", fixture 27->" + std::to_string(kept));
}

// Gaussian elimination with partial pivoting; independent of the library's Cholesky.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= m * a[c][k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// 4. Fitted LDA agrees with the true Bayes rule.
void lda_bayes(Failures& f) {
  constexpr std::size_t dim = 4, classes = 8, per_class = 10'000, test_points = 10'000;
  // Sigma = L L^T with a fixed lower-triangular L.
  const double l[dim][dim] = {{1.0, 0, 0, 0}, {0.6, 0.8, 0, 0}, {-0.3, 0.4, 0.7, 0}, {0.2, -0.5, 0.3, 0.9}};
  std::vector<std::vector<double>> sigma(dim, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < dim; ++k) sigma[i][j] += l[i][k] * l[j][k];
    }
  }
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> n01;
  std::vector<std::vector<double>> mu(classes, std::vector<double>(dim));
  for (auto& m : mu) for (auto& v : m) v = 1.5 * n01(rng);

  auto draw = [&](std::size_t c) {
    std::vector<double> z(dim), x(dim);
    for (auto& v : z) v = n01(rng);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = mu[c][i];
      for (std::size_t k = 0; k <= i; ++k) x[i] += l[i][k] * z[k];
    }
    return x;
  };

  lda::TrainingSet ts;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      ts.x.push_back(draw(c));
      ts.labels.push_back(c);
    }
  }
  auto model = lda::fit_lda(ts, classes);

  std::vector<std::vector<double>> w(classes);
  std::vector<double> bias(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    w[c] = solve(sigma, mu[c]);
    double q = 0;
    for (std::size_t i = 0; i < dim; ++i) q += mu[c][i] * w[c][i];
    bias[c] = -0.5 * q;  // equal priors
  }

  std::uniform_int_distribution<std::size_t> pick(0, classes - 1);
  std::size_t agree = 0;
  for (std::size_t t = 0; t < test_points; ++t) {
    auto x = draw(pick(rng));
    std::size_t best = 0;
    double best_g = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
      double g = bias[c];
      for (std::size_t i = 0; i < dim; ++i) g += w[c][i] * x[i];
      if (g > best_g) {
        best_g = g;
        best = c;
      }
    }
    agree += lda::argmax(lda::discriminants(model, x)) == best;
  }
  const double rate = static_cast<double>(agree) / test_points;
  f.check(rate >= 0.99, "agreement " + fmt(rate));
  f.note("agreement " + fmt(rate, 5));
}

// 5. Simplex preservation, row-order invariance, tie-break example.
void fusion_algebra(Failures& f) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  auto simplex = [&] {
    fusion::EmotionWeights w{};
    double s = 0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v /= s;
    return w;
  };
  std::size_t violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    fusion::LikelihoodWeightMatrix m{simplex(), simplex(), simplex()};
    auto d = fusion::fuse(m);
    double s = 0;
    for (double v : d.mean_weights) {
      violations += v < 0.0 || v > 1.0;
      s += v;
    }
    violations += std::abs(s - 1.0) > 1e-9;
    std::array<std::size_t, 3> p{0, 1, 2};
    while (std::next_permutation(p.begin(), p.end())) {
      violations += !(fusion::fuse({m[p[0]], m[p[1]], m[p[2]]}) == d);
    }
  }
  f.check(violations == 0, std::to_string(violations) + " simplex/order violations");

  fusion::EmotionWeights hate{}, love{}, uniform;
  hate[2] = 1.0;
  love[3] = 1.0;
  uniform.fill(0.125);
  auto d = fusion::fuse({hate, love, uniform});
  f.check(d.mean_weights[2] == 0.375 && d.mean_weights[3] == 0.375, "tie weights");
  f.check(d.predicted == Emotion::hate, "tie resolved to lowest id");
  f.check(fusion::fuse({uniform, love, hate}).predicted == Emotion::hate, "tie after reorder");
}

// 6. End-to-end LOOCV on synthetic days.
void end_to_end(Failures& f) {
  eval::EvalConfig plain, pruned;
  pruned.prune = true;
  double sum_plain = 0, sum_pruned = 0, sum_null = 0;
  double null_lo = 1, null_hi = 0;
  constexpr std::uint64_t seeds = 5;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto strong = dataset(seed, 2.0);
    auto a = eval::run_loocv(strong, plain);
    auto b = eval::run_loocv(strong, pruned);
    auto z = eval::run_loocv(dataset(seed, 0.0), plain);
    sum_plain += a.metrics.accuracy;
    sum_pruned += b.metrics.accuracy;
    sum_null += z.metrics.accuracy;
    null_lo = std::min(null_lo, z.metrics.accuracy);
    null_hi = std::max(null_hi, z.metrics.accuracy);
    g_reports.push_back(std::move(a));
    g_reports.push_back(std::move(b));
    g_reports.push_back(std::move(z));
  }
  const double acc = sum_plain / seeds, acc_pruned = sum_pruned / seeds, acc_null = sum_null / seeds;
  f.check(acc >= 0.95, "delta=2 accuracy " + fmt(acc));
  f.check(null_lo >= 0.05 && null_hi <= 0.25,
          "delta=0 accuracy range [" + fmt(null_lo) + ", " + fmt(null_hi) + "]");
  const double gap = std::abs(acc - acc_pruned);
  f.check(gap <= 0.05, "pruning gap " + fmt(gap));
  f.note("delta=2 " + fmt(acc) + " (pruned " + fmt(acc_pruned) + "), delta=0 mean " +
         fmt(acc_null) + " in [" + fmt(null_lo) + ", " + fmt(null_hi) + "]");
}

// 7. Identities on every report produced above.
void metric_identities(Failures& f) {
  f.check(!g_reports.empty(), "no reports to check");
  for (const auto& r : g_reports) {
    const auto& m = r.metrics;
    std::size_t total = 0, correct = 0;
    for (std::size_t t = 0; t < kEmotionCount; ++t) {
      for (std::size_t p = 0; p < kEmotionCount; ++p) total += m.confusion[t][p];
      correct += m.confusion[t][t];
    }
    f.check(total == r.folds.size() * kEmotionCount, "confusion total " + std::to_string(total));
    f.check(m.accuracy == static_cast<double>(correct) / static_cast<double>(total),
            "accuracy not recomputable");
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      double s = 0;
      for (double v : m.mscr[e]) s += v;
      f.check(std::abs(s - (1.0 - m.tpr[e])) <= 1e-12, "mscr row " + std::to_string(e));
    }
  }
  f.note(std::to_string(g_reports.size()) + " reports");
}

// 8. Perturbing the held-out session leaves that fold's models bit-identical.
void no_leakage(Failures& f) {
  auto sessions = dataset(11, 2.0);
  for (bool prune : {false, true}) {
    eval::EvalConfig cfg;
    cfg.prune = prune;
    const auto base = eval::prepare(sessions, cfg);
    for (std::size_t held = 0; held < sessions.size(); ++held) {
      auto moved = sessions;
      std::mt19937_64 rng(held);
      std::normal_distribution<double> d;
      auto ch = moved[held].channels();
      for (auto& c : ch) for (auto& v : c) v = 5.0 * v + d(rng);
      moved[held] = moved[held].with_channels(ch);
      const auto data = eval::prepare(moved, cfg);
      const auto& id = sessions[held].id();
      f.check(eval::train_fold(base.table, id, cfg) == eval::train_fold(data.table, id, cfg),
              "fold " + id + (prune ? " (pruned)" : ""));
    }
  }
  f.note(std::to_string(sessions.size() * 2) + " folds bit-identical");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 9. Two CLI runs with identical flags give byte-identical report JSON.
void determinism(Failures& f) {
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const auto dir = g_scratch / ("run" + std::to_string(run));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string data = (dir / "data").string(), out = (dir / "out").string();
    const std::string synth = "\"" + g_cli + "\" synth --days 20 --seed 7 --separation 2 --out \"" + data + "\"";
    const std::string evaluate = "\"" + g_cli + "\" evaluate --manifest \"" + data +
                                 "/manifest.json\" --prune --out \"" + out + "\" > \"" +
                                 (dir / "stdout.txt").string() + "\" 2>&1";
    f.check(std::system(synth.c_str()) == 0, "synth run " + std::to_string(run));
    f.check(std::system(evaluate.c_str()) == 0, "evaluate run " + std::to_string(run));
    reports.push_back(slurp(fs::path(out) / "report.json"));
  }
  f.check(!reports[0].empty(), "empty report");
  f.check(reports[0] == reports[1], "report.json differs between runs");
  f.note("report.json " + std::to_string(reports[0].size()) + " bytes identical");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 = no limit
  std::function<void(Failures&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: " << argv[0] << " <affectfuse-cli> <scratch-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_scratch = argv[2];
  fs::create_directories(g_scratch);

  const std::vector<Criterion> criteria{
      {1, "dsp-correctness", 5.0, dsp_correctness},
      {2, "feature-oracles", 10.0, feature_oracles},
      {3, "pruning-contract", 0.0, pruning_contract},
      {4, "lda-bayes-consistency", 30.0, lda_bayes},
      {5, "fusion-algebra", 0.0, fusion_algebra},
      {6, "end-to-end-synthetic", 60.0, end_to_end},
      {7, "metric-identities", 0.0, metric_identities},
      {8, "no-leakage", 0.0, no_leakage},
      {9, "determinism", 0.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Failures f;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(f);
    } catch (const std::exception& e) {
      f.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0) f.check(secs < c.limit_s, "runtime " + fmt(secs) + " s over " + fmt(c.limit_s) + " s");
    std::printf("%s %d %s (%.2f s) %s\n", f.ok() ? "PASS" : "FAIL", c.id, c.name, secs,
                f.summary().c_str());
    std::fflush(stdout);
    failed += !f.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
