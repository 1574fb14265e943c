#pragma once

#include <string_view>

namespace convtrace::log {

enum class Level { trace, debug, info, warn, error, off };

/// Reads CONVTRACE_LOG (trace|debug|info|warn|error|off) once; default is warn.
void init_from_env();
void set_level(Level level);

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace convtrace::log
