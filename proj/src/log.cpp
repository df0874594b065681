#include "tariffgrid/log.hpp"

#include <cstdlib>
#include <cstring>

namespace tariffgrid::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("TARIFFGRID_LOG");
    if (env == nullptr) return Level::Warn;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "off") == 0) return Level::Off;
    return Level::Warn;
}

Level g_threshold = parse_env();

const char* level_tag(Level level) {
    switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    default: return "?";
    }
}

} // namespace

Level threshold() { return g_threshold; }

void set_threshold(Level level) { g_threshold = level; }

void write(Level level, const std::string& msg) {
    if (level < g_threshold) return;
    std::fprintf(stderr, "[tariffgrid %s] %s\n", level_tag(level), msg.c_str());
}

} // namespace tariffgrid::log
