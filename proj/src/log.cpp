// Apache License, Version 2.0, refer to LICENSE.txt

#include "cdosr/log.hpp"

#include <iostream>
#include <mutex>

namespace cdosr {

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink;
  return sink;
}

void emit(std::string_view level, std::string_view msg) {
  std::lock_guard<std::mutex> lock(log_mutex());
  if (current_sink()) {
    current_sink()(level, msg);
  } else {
    std::cerr << "[cdosr " << level << "] " << msg << '\n';
  }
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(log_mutex());
  LogSink old = std::move(current_sink());
  current_sink() = std::move(sink);
  return old;
}

void log_warning(std::string_view msg) { emit("warning", msg); }
void log_info(std::string_view msg) { emit("info", msg); }

}  // namespace cdosr
