#include "log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "errors.hpp"

namespace seoe::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level level) {
    switch (level) {
        case Level::Debug: return "debug";
        case Level::Info: return "info";
        case Level::Warn: return "warn";
        case Level::Error: return "error";
        default: return "?";
    }
}
}  // namespace

void set_level(Level level) { g_level.store(level); }

Level level() { return g_level.load(); }

Level level_from_string(const std::string& name) {
    if (name == "debug") return Level::Debug;
    if (name == "info") return Level::Info;
    if (name == "warn" || name == "warning") return Level::Warn;
    if (name == "error") return Level::Error;
    if (name == "off" || name == "quiet") return Level::Off;
    throw ConfigError("unknown log level: " + name);
}

void emit(Level level, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[" << tag(level) << "] " << message << "\n";
}

}  // namespace seoe::log
