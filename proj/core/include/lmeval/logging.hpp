#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace lmeval::logging {

using Field = std::pair<std::string_view, std::string>;
using Sink = std::function<void(std::string_view line)>;

/// Emits one "event key=value ..." line to the active sink. Values with
/// spaces are quoted. No-op while logging is disabled.
void info(std::string_view event, std::initializer_list<Field> fields);

void set_enabled(bool enabled);
bool enabled();

/// Replaces the output sink (default: stderr). Pass nullptr to restore
/// the default. The sink is called under a lock; keep it fast.
void set_sink(Sink sink);

std::string field_str(double value);

}  // namespace lmeval::logging
