#pragma once

// Internal line-delimited JSON plumbing shared by the record loaders.
// Not installed; include from core/src only.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "lmeval/error.hpp"

namespace lmeval::detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& require(const ordered_json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw Error(fmt::format("missing field '{}'", field));
  }
  return *it;
}

template <typename T, typename FromJson>
std::vector<T> load_lines(const std::filesystem::path& path,
                          FromJson from_json) {
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot open '{}'", path.string()));
  }
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), lineno,
                       fmt::format("invalid JSON: {}", e.what()));
    }
    try {
      out.push_back(from_json(j));
    } catch (const std::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return out;
}

template <typename T, typename ToJson>
void save_lines(std::span<const T> records, const std::filesystem::path& path,
                ToJson to_json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(fmt::format("cannot write '{}'", path.string()));
  }
  for (const auto& record : records) {
    out << to_json(record).dump() << '\n';
  }
  if (!out) {
    throw Error(fmt::format("write failed for '{}'", path.string()));
  }
}

}  // namespace lmeval::detail
