#pragma once

#include <functional>
#include <string>

#include <json.hpp>

namespace metais::log {

using Sink = std::function<void(const std::string&)>;

/// Installs the receiver of progress events; an empty sink silences them (the default).
void set_sink(Sink sink);

/// Emits one structured progress line. Thread-safe.
void event(const nlohmann::json& payload);

}  // namespace metais::log
