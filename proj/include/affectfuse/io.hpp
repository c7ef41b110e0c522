#pragma once

// Session CSV (`t,emg,bvp,gsr,label`) and JSON manifest reading/writing.
// Reals are written in shortest round-trip form, so write -> read is bit-exact.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "affectfuse/core.hpp"
#include "affectfuse/error.hpp"

namespace affectfuse::io {

namespace fs = std::filesystem;

inline constexpr std::string_view kSessionHeader = "t,emg,bvp,gsr,label";

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

inline void write_session_csv(std::ostream& os, const Session& s) {
  std::string line;
  os << kSessionHeader << '\n';
  const double dt = 1.0 / s.fs_hz();
  for (std::size_t i = 0; i < s.size(); ++i) {
    line.clear();
    append_double(line, static_cast<double>(i) * dt);
    for (ChannelKind c : kChannels) {
      line += ',';
      append_double(line, s.channel(c)[i]);
    }
    line += ',';
    line += std::to_string(id_of(s.labels()[i]));
    line += '\n';
    os << line;
  }
}

inline void write_session_csv(const fs::path& path, const Session& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestError("cannot open " + path.string() + " for writing");
  write_session_csv(os, s);
  if (!os) throw IngestError("write failed: " + path.string());
}

namespace detail {

inline double parse_real(std::string_view field, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw IngestError(where + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace detail

/// Parse a session CSV. `fs_hz` comes from the manifest; the `t` column must be
/// strictly increasing with step 1/fs (tolerance 1e-6 s).
inline Session read_session_csv(std::istream& is, std::string session_id, double fs_hz,
                                const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != kSessionHeader) {
    throw IngestError(source + ": row 1: expected header '" + std::string(kSessionHeader) + "'");
  }
  Session::Channels channels;
  std::vector<Emotion> labels;
  const double dt = 1.0 / fs_hz;
  double prev_t = 0.0;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    std::string_view rest = detail::trim(line);
    if (rest.empty()) continue;
    const std::string where = source + ": row " + std::to_string(row);
    std::array<std::string_view, 5> fields;
    std::size_t n = 0;
    while (true) {
      auto comma = rest.find(',');
      if (n == fields.size()) throw IngestError(where + ": too many columns");
      fields[n++] = rest.substr(0, comma);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (n != fields.size()) throw IngestError(where + ": expected 5 columns");

    const double t = detail::parse_real(fields[0], where);
    if (!labels.empty()) {
      if (t <= prev_t || std::abs((t - prev_t) - dt) > 1e-6) {
        throw IngestError(where + ": time column is not monotone with step 1/fs");
      }
    }
    prev_t = t;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      channels[c].push_back(detail::parse_real(fields[c + 1], where));
    }
    long id = -1;
    auto lf = fields[4];
    auto res = std::from_chars(lf.data(), lf.data() + lf.size(), id);
    auto label = emotion_from_id(id);
    if (res.ec != std::errc{} || res.ptr != lf.data() + lf.size() || !label) {
      throw IngestError(where + ": label must be an integer in 0..8");
    }
    labels.push_back(*label);
  }
  try {
    return Session(std::move(session_id), fs_hz, std::move(channels), std::move(labels));
  } catch (const IngestError& e) {
    throw IngestError(source + ": " + e.what());
  }
}

inline Session read_session_csv(const fs::path& path, double fs_hz) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestError("cannot open session file " + path.string());
  return read_session_csv(is, path.stem().string(), fs_hz, path.string());
}

struct Manifest {
  double fs_hz = 20.0;
  std::vector<std::string> sessions;  ///< paths relative to the manifest's directory
  fs::path base_dir;
};

inline Manifest parse_manifest(const nlohmann::json& j, fs::path base_dir,
                               const std::string& source = "<manifest>") {
  Manifest m;
  m.base_dir = std::move(base_dir);
  try {
    m.fs_hz = j.at("fs_hz").get<double>();
    m.sessions = j.at("sessions").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(source + ": " + e.what());
  }
  if (!(std::isfinite(m.fs_hz) && m.fs_hz > 0.0)) {
    throw IngestError(source + ": fs_hz must be positive");
  }
  if (m.sessions.size() < 2) throw IngestError(source + ": need at least 2 sessions");
  return m;
}

inline Manifest read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IngestError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
  return parse_manifest(j, path.parent_path(), path.string());
}

inline nlohmann::json to_json(const Manifest& m) {
  return nlohmann::json{{"fs_hz", m.fs_hz}, {"sessions", m.sessions}};
}

inline void write_manifest(const fs::path& path, const Manifest& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IngestError("cannot open " + path.string() + " for writing");
  os << to_json(m).dump(2) << '\n';
}

inline std::vector<Session> load_sessions(const Manifest& m) {
  std::vector<Session> out;
  out.reserve(m.sessions.size());
  for (const auto& rel : m.sessions) out.push_back(read_session_csv(m.base_dir / rel, m.fs_hz));
  return out;
}

}  // namespace affectfuse::io
