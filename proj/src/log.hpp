#pragma once

#include <sstream>
#include <string>

namespace seoe::log {

enum class Level : int { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

void set_level(Level level);
Level level();
Level level_from_string(const std::string& name);

// Emits "[warn] message" to stderr. Log output never goes into pipeline
// artifacts, so run outputs stay byte-stable.
void emit(Level level, const std::string& message);

namespace detail {
template <typename... Args>
std::string concat(const Args&... args) {
    std::ostringstream oss;
    (oss << ... << args);
    return oss.str();
}
}  // namespace detail

template <typename... Args>
void debug(const Args&... args) {
    if (level() <= Level::Debug) emit(Level::Debug, detail::concat(args...));
}
template <typename... Args>
void info(const Args&... args) {
    if (level() <= Level::Info) emit(Level::Info, detail::concat(args...));
}
template <typename... Args>
void warn(const Args&... args) {
    if (level() <= Level::Warn) emit(Level::Warn, detail::concat(args...));
}
template <typename... Args>
void error(const Args&... args) {
    if (level() <= Level::Error) emit(Level::Error, detail::concat(args...));
}

}  // namespace seoe::log
