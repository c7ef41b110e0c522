#pragma once

// Correlation-threshold feature pruning, computed on training rows only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "affectfuse/core.hpp"
#include "affectfuse/error.hpp"
#include "affectfuse/features.hpp"

namespace affectfuse::selection {

inline constexpr double kDefaultThreshold = 0.8;

struct FeatureMask {
  std::vector<FeatureIndex> kept;  ///< ascending
  double threshold = kDefaultThreshold;

  /// Kept indices belonging to one channel, ascending.
  std::vector<FeatureIndex> for_channel(ChannelKind c) const {
    std::vector<FeatureIndex> out;
    for (auto idx : kept) if (idx.channel() == c) out.push_back(idx);
    return out;
  }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

/// Sample Pearson correlation; 0 when either column has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw LengthError("pearson: columns must have equal length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

namespace detail {

inline bool has_variance(std::span<const double> col) {
  for (double v : col) if (v != col.front()) return true;
  return false;
}

}  // namespace detail

/// Build a mask over the given training rows: drop zero-variance columns, then
/// scan 0..26 and keep column j iff |r(j, k)| <= threshold for every kept k.
/// Throws ContractError if a channel ends up with no kept feature.
inline FeatureMask prune_correlated(std::span<const features::FeatureRow> rows,
                                    double threshold = kDefaultThreshold) {
  if (rows.size() < 2) throw LengthError("prune_correlated: need at least 2 training rows");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ParameterError("prune_correlated: threshold must lie in (0, 1]");
  }

  std::array<std::vector<double>, kFeatureCount> cols;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    cols[j].reserve(rows.size());
    for (const auto& r : rows) cols[j].push_back(r.values[j]);
  }

  FeatureMask mask;
  mask.threshold = threshold;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!detail::has_variance(cols[j])) continue;
    bool keep = true;
    for (auto k : mask.kept) {
      if (std::abs(pearson(cols[j], cols[k.value()])) > threshold) {
        keep = false;
        break;
      }
    }
    if (keep) mask.kept.emplace_back(j);
  }

  for (ChannelKind c : kChannels) {
    if (mask.for_channel(c).empty()) {
      throw ContractError("prune_correlated: every feature of channel " +
                          std::string(name_of(c)) + " was dropped");
    }
  }
  return mask;
}

inline FeatureMask prune_correlated(const features::FeatureTable& table,
                                    double threshold = kDefaultThreshold) {
  return prune_correlated(std::span<const features::FeatureRow>(table.rows), threshold);
}

/// Every non-constant column, with no correlation pruning.
inline FeatureMask keep_varying(std::span<const features::FeatureRow> rows) {
  if (rows.empty()) throw LengthError("keep_varying: no rows");
  FeatureMask mask;
  mask.threshold = 1.0;
  std::vector<double> col(rows.size());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i].values[j];
    if (detail::has_variance(col)) mask.kept.emplace_back(j);
  }
  for (ChannelKind c : kChannels) {
    if (mask.for_channel(c).empty()) {
      throw ContractError("channel " + std::string(name_of(c)) + " has no varying feature");
    }
  }
  return mask;
}

}  // namespace affectfuse::selection
