#include "lmeval/logging.hpp"

#include <cstdio>
#include <mutex>

#include <fmt/format.h>

namespace lmeval::logging {
namespace {

std::mutex g_mutex;
bool g_enabled = false;
Sink g_sink;

void default_sink(std::string_view line) {
  std::fputs(std::string(line).c_str(), stderr);
  std::fputc('\n', stderr);
}

bool needs_quotes(std::string_view v) {
  return v.find(' ') != std::string_view::npos || v.empty();
}

}  // namespace

void info(std::string_view event, std::initializer_list<Field> fields) {
  std::lock_guard lock(g_mutex);
  if (!g_enabled) return;
  std::string line(event);
  for (const auto& [key, value] : fields) {
    if (needs_quotes(value)) {
      line += fmt::format(" {}=\"{}\"", key, value);
    } else {
      line += fmt::format(" {}={}", key, value);
    }
  }
  if (g_sink) {
    g_sink(line);
  } else {
    default_sink(line);
  }
}

void set_enabled(bool enabled) {
  std::lock_guard lock(g_mutex);
  g_enabled = enabled;
}

bool enabled() {
  std::lock_guard lock(g_mutex);
  return g_enabled;
}

void set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

std::string field_str(double value) { return fmt::format("{:.6g}", value); }

}  // namespace lmeval::logging
