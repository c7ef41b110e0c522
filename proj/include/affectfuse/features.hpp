#pragma once

// Nine per-channel features and the 27-column (session, emotion) feature table.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "affectfuse/core.hpp"
#include "affectfuse/dsp.hpp"
#include "affectfuse/error.hpp"

namespace affectfuse::features {

inline constexpr std::size_t kDefaultEntropyBins = 16;

using FeatureVector = std::array<double, kFeaturesPerChannel>;
using FeatureRowValues = std::array<double, kFeatureCount>;

/// Strict local maxima; a plateau above both neighbours counts once.
inline std::size_t count_peaks(std::span<const double> x) {
  if (x.size() < 3) throw LengthError("count_peaks: need at least 3 samples");
  return dsp::local_extrema(x).size();
}

/// Histogram entropy in nats over `bins` equal-width bins spanning [min, max].
inline double shannon_entropy(std::span<const double> x, std::size_t bins = kDefaultEntropyBins) {
  if (x.empty()) throw LengthError("shannon_entropy: empty input");
  if (bins == 0) throw ParameterError("shannon_entropy: bins must be positive");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  if (!(range > 0.0)) return 0.0;

  std::vector<std::size_t> counts(bins, 0);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) / range * static_cast<double>(bins));
    ++counts[std::min(b, bins - 1)];
  }
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  ///< population (divide by N)
  double kurtosis = 0.0;  ///< m4 / m2^2, non-excess; 0 when variance < 1e-24
};

inline Moments moments(std::span<const double> x) {
  if (x.size() < 2) throw LengthError("moments: need at least 2 samples");
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  Moments m;
  m.mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  m.variance = m2;
  m.kurtosis = m2 < 1e-24 ? 0.0 : m4 / (m2 * m2);
  return m;
}

namespace detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace detail

/// One-sided periodogram of x, bins k = 0..N/2, normalized so that the bins
/// sum to the mean square (1/N) * sum x^2. Bin 0 is mean(x)^2.
inline std::vector<double> periodogram(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw LengthError("periodogram: need at least 2 samples");
  const std::size_t nbins = n / 2 + 1;

  std::vector<double> in(x.begin(), x.end());
  fftw_complex* out = fftw_alloc_complex(nbins);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);

  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  std::vector<double> p(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    p[k] = mag2 * scale * (unpaired ? 1.0 : 2.0);
  }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(out);
  }
  return p;
}

struct Powers {
  double signal = 0.0;    ///< (1/N) sum x^2
  double spectral = 0.0;  ///< periodogram mass outside the DC bin
};

inline Powers powers(std::span<const double> x) {
  if (x.size() < 2) throw LengthError("powers: need at least 2 samples");
  Powers p;
  for (double v : x) p.signal += v * v;
  p.signal /= static_cast<double>(x.size());
  const auto pg = periodogram(x);
  for (std::size_t k = 1; k < pg.size(); ++k) p.spectral += pg[k];
  return p;
}

/// [max, min, peaks, mean, variance, kurtosis, entropy, power, spectral power]
/// of one segment of one channel. `fs_hz` enforces the 10 s minimum.
inline FeatureVector extract_features(std::span<const double> x, double fs_hz,
                                      std::size_t entropy_bins = kDefaultEntropyBins) {
  if (static_cast<double>(x.size()) < kMinSegmentSeconds * fs_hz) {
    throw LengthError("extract_features: segment shorter than 10 s");
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const auto m = moments(x);
  const auto pw = powers(x);
  return {*hi,
          *lo,
          static_cast<double>(count_peaks(x)),
          m.mean,
          m.variance,
          m.kurtosis,
          shannon_entropy(x, entropy_bins),
          pw.signal,
          pw.spectral};
}

struct FeatureRow {
  std::string session_id;
  Emotion emotion = Emotion::no_emotion;
  FeatureRowValues values{};
};

/// Rows ordered by session (input order) then emotion id; 8 rows per session.
struct FeatureTable {
  std::vector<FeatureRow> rows;

  /// Values of one column over all rows.
  std::vector<double> column(FeatureIndex idx) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.values[idx.value()]);
    return out;
  }
};

/// The 8 rows of one preprocessed session. Disjoint runs of the same emotion
/// are averaged elementwise.
inline std::vector<FeatureRow> session_rows(const Session& s,
                                            std::size_t entropy_bins = kDefaultEntropyBins) {
  const auto segments = segments_of(s);
  std::array<FeatureRowValues, kEmotionCount> sums{};
  std::array<std::size_t, kEmotionCount> runs{};
  for (const auto& seg : segments) {
    const std::size_t e = slot_of(seg.emotion);
    for (ChannelKind c : kChannels) {
      std::span<const double> samples(s.channel(c).data() + seg.start, seg.length());
      const auto fv = extract_features(samples, s.fs_hz(), entropy_bins);
      for (std::size_t k = 0; k < kFeaturesPerChannel; ++k) {
        sums[e][index_of(c) * kFeaturesPerChannel + k] += fv[k];
      }
    }
    ++runs[e];
  }
  std::vector<FeatureRow> rows;
  rows.reserve(kEmotionCount);
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    if (runs[e] == 0) {
      throw IngestError("session " + s.id() + ": missing emotion " + std::to_string(e + 1));
    }
    FeatureRow row{s.id(), emotion_from_slot(e), sums[e]};
    if (runs[e] > 1) {
      for (double& v : row.values) v /= static_cast<double>(runs[e]);
    }
    for (double v : row.values) {
      if (!std::isfinite(v)) {
        throw ContractError("session " + s.id() + ": non-finite feature value");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline FeatureTable build_feature_table(std::span<const Session> sessions,
                                        std::size_t entropy_bins = kDefaultEntropyBins) {
  FeatureTable table;
  table.rows.reserve(sessions.size() * kEmotionCount);
  for (const auto& s : sessions) {
    auto rows = session_rows(s, entropy_bins);
    table.rows.insert(table.rows.end(), std::make_move_iterator(rows.begin()),
                      std::make_move_iterator(rows.end()));
  }
  return table;
}

}  // namespace affectfuse::features
