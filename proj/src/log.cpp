#include "metais/log.hpp"

#include <mutex>

namespace metais::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink;
  return sink;
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void event(const nlohmann::json& payload) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(payload.dump());
}

}  // namespace metais::log
