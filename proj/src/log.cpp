#include "corvo/core/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace corvo {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("CORVO_LOG");
        if (!env) return LogLevel::kWarn;
        if (std::strcmp(env, "error") == 0) return LogLevel::kError;
        if (std::strcmp(env, "warn") == 0) return LogLevel::kWarn;
        if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
        if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
        return LogLevel::kWarn;
    }();
    return level;
}

void log_msg(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace corvo
