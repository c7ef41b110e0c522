#pragma once

// Minimal leveled logger. Level comes from AFFECTFUSE_LOG (warn|info|debug),
// default warn. Lines go to stderr as "<LEVEL> <message>".

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace affectfuse::log {

enum class Level { warn = 0, info = 1, debug = 2 };

inline Level level_from_env() {
  const char* env = std::getenv("AFFECTFUSE_LOG");
  if (env == nullptr) return Level::warn;
  std::string_view v{env};
  if (v == "debug") return Level::debug;
  if (v == "info") return Level::info;
  return Level::warn;
}

inline Level& current_level() {
  static Level level = level_from_env();
  return level;
}

inline void write(Level lvl, std::string_view msg) {
  if (static_cast<int>(lvl) > static_cast<int>(current_level())) return;
  static std::mutex mu;
  const char* tag = lvl == Level::warn ? "WARN" : lvl == Level::info ? "INFO" : "DEBUG";
  std::lock_guard lock(mu);
  std::cerr << tag << ' ' << msg << '\n';
}

inline void warn(std::string_view msg) { write(Level::warn, msg); }
inline void info(std::string_view msg) { write(Level::info, msg); }
inline void debug(std::string_view msg) { write(Level::debug, msg); }

}  // namespace affectfuse::log
