#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace plqr::log {

enum class Level : int { quiet = 0, info = 1, debug = 2 };

// Level comes from PLQR_LOG (quiet|info|debug), default info.
inline Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("PLQR_LOG");
        if (env == nullptr) return Level::info;
        const std::string s(env);
        if (s == "quiet") return Level::quiet;
        if (s == "debug") return Level::debug;
        return Level::info;
    }();
    return lvl;
}

inline void info(const std::string& msg) {
    if (level() >= Level::info) std::cerr << "[plqr] " << msg << '\n';
}

inline void debug(const std::string& msg) {
    if (level() >= Level::debug) std::cerr << "[plqr:debug] " << msg << '\n';
}

}  // namespace plqr::log
