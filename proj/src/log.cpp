#include "convtrace/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace convtrace::log {
namespace {

std::shared_ptr<spdlog::logger> logger()
{
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto l = spdlog::stderr_color_mt("convtrace");
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        return l;
    }();
    return instance;
}

spdlog::level::level_enum to_spdlog(Level level)
{
    switch (level) {
    case Level::trace: return spdlog::level::trace;
    case Level::debug: return spdlog::level::debug;
    case Level::info: return spdlog::level::info;
    case Level::warn: return spdlog::level::warn;
    case Level::error: return spdlog::level::err;
    case Level::off: return spdlog::level::off;
    }
    return spdlog::level::warn;
}

}  // namespace

void init_from_env()
{
    static std::once_flag once;
    std::call_once(once, [] {
        const char* env = std::getenv("CONVTRACE_LOG");
        if (env == nullptr) return;
        const std::string v(env);
        if (v == "trace") set_level(Level::trace);
        else if (v == "debug") set_level(Level::debug);
        else if (v == "info") set_level(Level::info);
        else if (v == "warn") set_level(Level::warn);
        else if (v == "error") set_level(Level::error);
        else if (v == "off") set_level(Level::off);
    });
}

void set_level(Level level) { logger()->set_level(to_spdlog(level)); }

void debug(std::string_view message) { logger()->debug("{}", message); }
void info(std::string_view message) { logger()->info("{}", message); }
void warn(std::string_view message) { logger()->warn("{}", message); }
void error(std::string_view message) { logger()->error("{}", message); }

}  // namespace convtrace::log
