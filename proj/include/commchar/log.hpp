#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string_view>

namespace commchar::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

inline std::atomic<Level>& threshold() {
  static std::atomic<Level> level{Level::warn};
  return level;
}

inline void set_level(Level level) { threshold().store(level); }

inline bool enabled(Level level) { return level >= threshold().load(); }

inline std::string_view name(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "off";
  }
}

// Emits one logfmt-style line on stderr: `level=info event=<event> k=v ...`.
template <typename... Fields>
void emit(Level level, std::string_view event, const Fields&... fields) {
  static_assert(sizeof...(Fields) % 2 == 0, "fields come in key/value pairs");
  if (!enabled(level)) return;
  std::ostringstream line;
  line << "level=" << name(level) << " event=" << event;
  bool key = true;
  ((line << (key ? " " : "=") << fields, key = !key), ...);
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << line.str() << '\n';
}

template <typename... Fields>
void debug(std::string_view event, const Fields&... f) { emit(Level::debug, event, f...); }
template <typename... Fields>
void info(std::string_view event, const Fields&... f) { emit(Level::info, event, f...); }
template <typename... Fields>
void warn(std::string_view event, const Fields&... f) { emit(Level::warn, event, f...); }

}  // namespace commchar::log
