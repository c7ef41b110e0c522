#pragma once

// Domain types shared by every stage of the pipeline: channels, emotion
// labels, sessions, labeled segments and the 27-slot feature index.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affectfuse/error.hpp"

namespace affectfuse {

inline constexpr std::size_t kChannelCount = 3;
inline constexpr std::size_t kEmotionCount = 8;
inline constexpr std::size_t kFeaturesPerChannel = 9;
inline constexpr std::size_t kFeatureCount = kChannelCount * kFeaturesPerChannel;
inline constexpr double kMinSegmentSeconds = 10.0;

enum class ChannelKind : std::uint8_t { emg = 0, bvp = 1, gsr = 2 };

inline constexpr std::array<ChannelKind, kChannelCount> kChannels{
    ChannelKind::emg, ChannelKind::bvp, ChannelKind::gsr};

constexpr std::size_t index_of(ChannelKind c) { return static_cast<std::size_t>(c); }

constexpr std::string_view name_of(ChannelKind c) {
  switch (c) {
    case ChannelKind::emg: return "emg";
    case ChannelKind::bvp: return "bvp";
    case ChannelKind::gsr: return "gsr";
  }
  return "?";
}

/// Emotion label. 0 marks transition/unlabeled samples; 1..8 are the classes.
enum class Emotion : std::uint8_t {
  transition = 0,
  no_emotion = 1,
  anger = 2,
  hate = 3,
  grief = 4,
  platonic_love = 5,
  romantic_love = 6,
  joy = 7,
  reverence = 8,
};

constexpr int id_of(Emotion e) { return static_cast<int>(e); }

/// Zero-based class slot (0..7) of a non-transition emotion.
constexpr std::size_t slot_of(Emotion e) { return static_cast<std::size_t>(e) - 1; }

constexpr Emotion emotion_from_slot(std::size_t slot) {
  return static_cast<Emotion>(slot + 1);
}

constexpr bool is_class(Emotion e) { return id_of(e) >= 1 && id_of(e) <= 8; }

inline std::optional<Emotion> emotion_from_id(long id) {
  if (id < 0 || id > 8) return std::nullopt;
  return static_cast<Emotion>(id);
}

constexpr std::string_view name_of(Emotion e) {
  switch (e) {
    case Emotion::transition: return "transition";
    case Emotion::no_emotion: return "no-emotion";
    case Emotion::anger: return "anger";
    case Emotion::hate: return "hate";
    case Emotion::grief: return "grief";
    case Emotion::platonic_love: return "platonic-love";
    case Emotion::romantic_love: return "romantic-love";
    case Emotion::joy: return "joy";
    case Emotion::reverence: return "reverence";
  }
  return "?";
}

/// Per-channel feature slots in canonical order.
enum class FeatureSlot : std::uint8_t {
  max = 0,
  min = 1,
  peak_count = 2,
  mean = 3,
  variance = 4,
  kurtosis = 5,
  entropy = 6,
  signal_power = 7,
  spectral_power = 8,
};

/// Column of the 27-wide feature table: channel = value / 9, slot = value % 9.
class FeatureIndex {
 public:
  constexpr FeatureIndex() = default;
  constexpr explicit FeatureIndex(std::size_t value) : value_(value) {
    if (value >= kFeatureCount) throw ParameterError("feature index out of range");
  }
  constexpr FeatureIndex(ChannelKind channel, FeatureSlot slot)
      : value_(index_of(channel) * kFeaturesPerChannel + static_cast<std::size_t>(slot)) {}

  constexpr std::size_t value() const { return value_; }
  constexpr ChannelKind channel() const {
    return static_cast<ChannelKind>(value_ / kFeaturesPerChannel);
  }
  constexpr FeatureSlot slot() const {
    return static_cast<FeatureSlot>(value_ % kFeaturesPerChannel);
  }

  friend constexpr auto operator<=>(FeatureIndex, FeatureIndex) = default;

 private:
  std::size_t value_ = 0;
};

/// One day's recording: three equal-length channels plus a per-sample label track.
/// Immutable once constructed; the constructor enforces the shape invariants.
class Session {
 public:
  using Channels = std::array<std::vector<double>, kChannelCount>;

  Session(std::string id, double fs_hz, Channels channels, std::vector<Emotion> labels)
      : id_(std::move(id)), fs_hz_(fs_hz), channels_(std::move(channels)),
        labels_(std::move(labels)) {
    if (!(std::isfinite(fs_hz_) && fs_hz_ > 0.0)) {
      throw IngestError("session " + id_ + ": sampling rate must be positive");
    }
    if (labels_.size() < 2) throw IngestError("session " + id_ + ": fewer than 2 samples");
    for (ChannelKind c : kChannels) {
      if (channels_[index_of(c)].size() != labels_.size()) {
        throw IngestError("session " + id_ + ": channel " + std::string(name_of(c)) +
                          " length differs from label track");
      }
    }
  }

  const std::string& id() const { return id_; }
  double fs_hz() const { return fs_hz_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<double>& channel(ChannelKind c) const { return channels_[index_of(c)]; }
  const Channels& channels() const { return channels_; }
  const std::vector<Emotion>& labels() const { return labels_; }

  /// Same labels and rate, new channel data.
  Session with_channels(Channels channels) const {
    return Session(id_, fs_hz_, std::move(channels), labels_);
  }

  friend bool operator==(const Session&, const Session&) = default;

 private:
  std::string id_;
  double fs_hz_;
  Channels channels_;
  std::vector<Emotion> labels_;
};

/// Half-open sample range [start, end) carrying one emotion label.
struct Segment {
  Emotion emotion = Emotion::transition;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Maximal runs of nonzero labels in temporal order. Every labeled sample lands
/// in exactly one segment; transitions (label 0) are excluded.
/// Throws IngestError on runs shorter than 10 s or when any of the 8 emotions
/// is missing entirely.
inline std::vector<Segment> segments_of(const Session& session) {
  const auto& labels = session.labels();
  const double min_len = kMinSegmentSeconds * session.fs_hz();
  std::vector<Segment> segments;
  std::array<bool, kEmotionCount> seen{};

  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == Emotion::transition) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    Segment seg{labels[i], i, j};
    if (static_cast<double>(seg.length()) < min_len) {
      throw IngestError("session " + session.id() + ": segment of emotion " +
                        std::to_string(id_of(seg.emotion)) + " at offset " +
                        std::to_string(i) + " is shorter than 10 s (" +
                        std::to_string(seg.length()) + " samples)");
    }
    seen[slot_of(seg.emotion)] = true;
    segments.push_back(seg);
    i = j;
  }

  if (segments.empty()) throw IngestError("session " + session.id() + ": no segments");

  std::string missing;
  for (std::size_t s = 0; s < kEmotionCount; ++s) {
    if (!seen[s]) {
      if (!missing.empty()) missing += ',';
      missing += std::to_string(s + 1);
    }
  }
  if (!missing.empty()) {
    throw IngestError("session " + session.id() + ": missing emotion ids " + missing);
  }
  return segments;
}

}  // namespace affectfuse
