#pragma once

// Seeded synthetic sessions standing in for real recordings.
//
// Each day holds the 8 emotions once, in a seeded shuffled order, separated by
// label-0 transitions. Channel r during emotion e is
//
//   offset_d + gain_d * (level + amp * sin(2 pi f t + phase) + sigma * noise)
//
// where level, amp, f and sigma move away from a shared baseline in
// proportion to the separation delta, differently per (channel, emotion).
// offset_d and gain_d are per-day nuisance terms. delta = 0 makes every
// emotion statistically identical.
//
// RNG: std::mt19937_64 seeded through std::seed_seq{seed_lo, seed_hi, day}.
// Streams are reproducible for a fixed standard library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "affectfuse/core.hpp"
#include "affectfuse/error.hpp"
#include "affectfuse/io.hpp"

namespace affectfuse::synth {

struct SynthConfig {
  std::size_t days = 20;
  std::uint64_t seed = 1;
  double separation = 1.0;
  double fs_hz = 20.0;
  double segment_seconds = 180.0;
  double transition_seconds = 5.0;
};

/// Per-(channel, emotion) direction of each emotion-dependent component, in [-1, 1].
struct EmotionProfile {
  double level;
  double amplitude;
  double frequency;
  double noise;
};

namespace detail {

// Distinct orderings per channel so the three modalities disagree on which
// emotions are close to each other.
inline constexpr std::array<std::array<int, kEmotionCount>, kChannelCount> kLevelRank{{
    {0, 5, 2, 7, 4, 1, 6, 3},
    {3, 0, 6, 2, 7, 5, 1, 4},
    {6, 3, 0, 4, 1, 7, 2, 5},
}};
inline constexpr std::array<std::array<int, kEmotionCount>, kChannelCount> kShapeRank{{
    {4, 1, 7, 0, 3, 6, 2, 5},
    {1, 6, 3, 5, 0, 2, 7, 4},
    {2, 7, 5, 1, 6, 0, 4, 3},
}};

inline constexpr std::array<double, kChannelCount> kBaseFrequencyHz{0.7, 1.2, 0.3};

inline double centered(int rank) { return 2.0 * rank / 7.0 - 1.0; }

}  // namespace detail

inline EmotionProfile profile(ChannelKind c, Emotion e) {
  const std::size_t r = index_of(c), s = slot_of(e);
  return {detail::centered(detail::kLevelRank[r][s]),
          detail::centered(detail::kShapeRank[r][s]),
          detail::centered(detail::kShapeRank[r][(s + 3) % kEmotionCount]),
          detail::centered(detail::kLevelRank[r][(s + 5) % kEmotionCount])};
}

struct ComponentParams {
  double level = 0.0;
  double amplitude = 1.0;
  double frequency_hz = 1.0;
  double sigma = 1.0;
};

/// Generating parameters for one (channel, emotion); transition samples use the
/// baseline (`emotion == Emotion::transition`).
inline ComponentParams component_params(ChannelKind c, Emotion e, double separation) {
  ComponentParams p;
  p.frequency_hz = detail::kBaseFrequencyHz[index_of(c)];
  if (e == Emotion::transition) return p;
  const auto pr = profile(c, e);
  p.level = separation * pr.level;
  p.amplitude = std::exp(0.4 * separation * pr.amplitude);
  p.frequency_hz *= std::exp(0.2 * separation * pr.frequency);
  p.sigma = std::exp(0.25 * separation * pr.noise);
  return p;
}

inline std::string day_id(std::size_t day) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "day%02zu", day + 1);
  return buf;
}

/// One session, fully determined by (config.seed, day).
inline Session generate_day(const SynthConfig& cfg, std::size_t day) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                    static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(day)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::array<Emotion, kEmotionCount> order{};
  for (std::size_t s = 0; s < kEmotionCount; ++s) order[s] = emotion_from_slot(s);
  std::shuffle(order.begin(), order.end(), rng);

  std::array<double, kChannelCount> offset{}, gain{};
  for (std::size_t r = 0; r < kChannelCount; ++r) {
    offset[r] = 2.0 * normal(rng);
    gain[r] = 0.8 + 0.45 * uniform(rng);
  }

  const auto seg_len = static_cast<std::size_t>(std::llround(cfg.segment_seconds * cfg.fs_hz));
  const auto gap_len = static_cast<std::size_t>(std::llround(cfg.transition_seconds * cfg.fs_hz));

  Session::Channels channels;
  std::vector<Emotion> labels;
  std::size_t t = 0;
  auto emit = [&](Emotion e, std::size_t n) {
    std::array<ComponentParams, kChannelCount> params;
    std::array<double, kChannelCount> phase{};
    for (ChannelKind c : kChannels) {
      params[index_of(c)] = component_params(c, e, cfg.separation);
      phase[index_of(c)] = 2.0 * std::numbers::pi * uniform(rng);
    }
    for (std::size_t i = 0; i < n; ++i, ++t) {
      const double time = static_cast<double>(t) / cfg.fs_hz;
      for (std::size_t r = 0; r < kChannelCount; ++r) {
        const auto& p = params[r];
        const double v = p.level +
                         p.amplitude * std::sin(2.0 * std::numbers::pi * p.frequency_hz * time +
                                                phase[r]) +
                         p.sigma * normal(rng);
        channels[r].push_back(offset[r] + gain[r] * v);
      }
      labels.push_back(e);
    }
  };

  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) emit(Emotion::transition, gap_len);
    emit(order[k], seg_len);
  }
  return Session(day_id(day), cfg.fs_hz, std::move(channels), std::move(labels));
}

inline std::vector<Session> generate(const SynthConfig& cfg) {
  if (cfg.days < 2) throw ParameterError("synth: days must be >= 2");
  if (!(cfg.separation >= 0.0) || !std::isfinite(cfg.separation)) {
    throw ParameterError("synth: separation must be nonnegative");
  }
  if (!(cfg.fs_hz > 0.0) || !(cfg.segment_seconds >= kMinSegmentSeconds) ||
      !(cfg.transition_seconds >= 0.0)) {
    throw ParameterError("synth: invalid sampling rate or durations");
  }
  std::vector<Session> out;
  out.reserve(cfg.days);
  for (std::size_t d = 0; d < cfg.days; ++d) out.push_back(generate_day(cfg, d));
  return out;
}

/// Write `<id>.csv` per session plus `manifest.json` into `dir`.
inline io::Manifest write_dataset(const std::filesystem::path& dir,
                                  const std::vector<Session>& sessions) {
  std::filesystem::create_directories(dir);
  io::Manifest m;
  m.base_dir = dir;
  m.fs_hz = sessions.empty() ? 20.0 : sessions.front().fs_hz();
  for (const auto& s : sessions) {
    const std::string name = s.id() + ".csv";
    io::write_session_csv(dir / name, s);
    m.sessions.push_back(name);
  }
  io::write_manifest(dir / "manifest.json", m);
  return m;
}

}  // namespace affectfuse::synth
