// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <string_view>

namespace cdosr {

using LogSink = std::function<void(std::string_view level, std::string_view msg)>;

// Replaces the process-wide sink and returns the previous one. A null sink
// restores the default (stderr).
LogSink set_log_sink(LogSink sink);

// Thread-safe; serialized through one mutex.
void log_warning(std::string_view msg);
void log_info(std::string_view msg);

}  // namespace cdosr
