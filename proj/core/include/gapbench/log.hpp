#pragma once

#include <functional>
#include <string_view>

namespace gapbench::log {

using Sink = std::function<void(std::string_view)>;

/// Replace the warning sink (default: one line to stderr). Returns the previous sink.
Sink set_warning_sink(Sink sink);

void warn(std::string_view message);

}  // namespace gapbench::log
