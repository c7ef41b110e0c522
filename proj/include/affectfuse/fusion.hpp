#pragma once

// Fusion of the three per-modality weight vectors: column means of the 3x8
// likelihood weight matrix, then argmax with the lowest emotion id on ties.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "affectfuse/core.hpp"
#include "affectfuse/error.hpp"

namespace affectfuse::fusion {

using EmotionWeights = std::array<double, kEmotionCount>;

/// Row r holds the weight vector of modality r (EMG, BVP, GSR).
using LikelihoodWeightMatrix = std::array<EmotionWeights, kChannelCount>;

struct FusedDecision {
  EmotionWeights mean_weights{};
  Emotion predicted = Emotion::no_emotion;

  friend bool operator==(const FusedDecision&, const FusedDecision&) = default;
};

inline constexpr double kRowSumTolerance = 1e-6;

inline FusedDecision fuse(const LikelihoodWeightMatrix& matrix) {
  for (std::size_t r = 0; r < kChannelCount; ++r) {
    double sum = 0.0;
    for (double v : matrix[r]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ContractError("fuse: row " + std::to_string(r) + " has an entry outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ContractError("fuse: row " + std::to_string(r) + " does not sum to 1");
    }
  }

  FusedDecision out;
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    // Sum in sorted order so the result does not depend on row order.
    std::array<double, kChannelCount> col{};
    for (std::size_t r = 0; r < kChannelCount; ++r) col[r] = matrix[r][e];
    std::sort(col.begin(), col.end());
    double s = 0.0;
    for (double v : col) s += v;
    out.mean_weights[e] = s / static_cast<double>(kChannelCount);
  }
  const auto best = std::max_element(out.mean_weights.begin(), out.mean_weights.end());
  out.predicted = emotion_from_slot(static_cast<std::size_t>(best - out.mean_weights.begin()));
  return out;
}

}  // namespace affectfuse::fusion
