#include "lmeval/reporting.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "lmeval/error.hpp"

namespace lmeval {

StrategyTable strategy_table(
    std::span<const std::pair<std::string, StrategyMetrics>> results) {
  if (results.empty()) throw Error("strategy table: no strategies");

  const std::string& digest = results.front().second.records_digest;
  std::set<std::string> sections;
  for (const auto& [name, metrics] : results) {
    if (metrics.records_digest != digest) {
      throw Error(fmt::format(
          "strategy '{}' was evaluated on a different record set "
          "(digest {} vs {})",
          name, metrics.records_digest, digest));
    }
    if (metrics.by_section.empty()) {
      throw Error(fmt::format("strategy '{}' has no section metrics", name));
    }
    for (const auto& [section, value] : metrics.by_section) {
      sections.insert(section);
    }
  }

  StrategyTable table;
  table.sections.assign(sections.begin(), sections.end());
  for (const auto& [name, metrics] : results) {
    if (metrics.by_section.size() != table.sections.size()) {
      throw Error(fmt::format(
          "strategy '{}' covers {} sections, expected {}", name,
          metrics.by_section.size(), table.sections.size()));
    }
    std::vector<double> row;
    double total = 0.0;
    for (const auto& section : table.sections) {
      auto it = metrics.by_section.find(section);
      if (it == metrics.by_section.end()) {
        throw Error(fmt::format("strategy '{}' is missing section '{}'", name,
                                section));
      }
      row.push_back(it->second);
      total += it->second;
    }
    table.strategies.push_back(name);
    table.cells.push_back(std::move(row));
    table.averages.push_back(total /
                             static_cast<double>(table.sections.size()));
  }
  return table;
}

std::string format_strategy_table(const StrategyTable& table) {
  std::vector<std::string> headers{"strategy"};
  headers.insert(headers.end(), table.sections.begin(), table.sections.end());
  headers.push_back("average");

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.strategies.size(); ++i) {
    std::vector<std::string> row{table.strategies[i]};
    for (double v : table.cells[i]) row.push_back(fmt::format("{:.4f}", v));
    row.push_back(fmt::format("{:.4f}", table.averages[i]));
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
  }

  auto emit_row = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      // first column left-aligned, numbers right-aligned
      line += c == 0 ? fmt::format("{:<{}}", row[c], widths[c])
                     : fmt::format("  {:>{}}", row[c], widths[c]);
    }
    line += '\n';
    return line;
  };

  std::string out = emit_row(headers);
  std::string rule;
  for (std::size_t c = 0; c < widths.size(); ++c) {
    rule += std::string(widths[c], '-');
    if (c + 1 < widths.size()) rule += "  ";
  }
  out += rule + "\n";
  for (const auto& row : rows) out += emit_row(row);
  return out;
}

std::vector<std::string> strategy_table_records(const StrategyTable& table) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < table.strategies.size(); ++i) {
    for (std::size_t c = 0; c < table.sections.size(); ++c) {
      nlohmann::ordered_json j;
      j["strategy"] = table.strategies[i];
      j["section"] = table.sections[c];
      j["value"] = table.cells[i][c];
      out.push_back(j.dump());
    }
    nlohmann::ordered_json j;
    j["strategy"] = table.strategies[i];
    j["section"] = "average";
    j["value"] = table.averages[i];
    out.push_back(j.dump());
  }
  return out;
}

std::vector<ErrorModeEntry> error_mode_summary(
    std::span<const std::vector<UnitTestResult>> per_record_results,
    std::span<const std::string> record_ids, std::size_t max_examples) {
  if (per_record_results.empty()) {
    throw Error("error mode summary: no records");
  }
  if (per_record_results.size() != record_ids.size()) {
    throw Error(fmt::format("error mode summary: {} result lists vs {} ids",
                            per_record_results.size(), record_ids.size()));
  }

  std::set<std::string> expected;
  for (const auto& result : per_record_results.front()) {
    expected.insert(result.test_id());
  }
  std::map<std::string, ErrorModeEntry> by_test;
  for (std::size_t r = 0; r < per_record_results.size(); ++r) {
    std::set<std::string> found;
    for (const auto& result : per_record_results[r]) {
      found.insert(result.test_id());
      auto& entry = by_test[result.test_id()];
      entry.test_id = result.test_id();
      ++entry.n_records;
      if (!result.passed()) {
        ++entry.n_failed;
        if (entry.example_record_ids.size() < max_examples) {
          entry.example_record_ids.push_back(record_ids[r]);
        }
      }
    }
    if (found != expected) {
      throw Error(fmt::format(
          "error mode summary: record '{}' was scored on a different test "
          "set",
          record_ids[r]));
    }
  }

  std::vector<ErrorModeEntry> out;
  out.reserve(by_test.size());
  for (auto& [id, entry] : by_test) {
    entry.failure_rate = static_cast<double>(entry.n_failed) /
                         static_cast<double>(entry.n_records);
    out.push_back(std::move(entry));
  }
  std::sort(out.begin(), out.end(),
            [](const ErrorModeEntry& a, const ErrorModeEntry& b) {
              if (a.failure_rate != b.failure_rate) {
                return a.failure_rate > b.failure_rate;
              }
              return a.test_id < b.test_id;
            });
  return out;
}

std::string format_error_modes(std::span<const ErrorModeEntry> entries) {
  std::size_t id_width = 7;  // len("test_id")
  for (const auto& e : entries) id_width = std::max(id_width, e.test_id.size());
  std::string out =
      fmt::format("{:<{}}  {:>6}  {:>7}  {:>6}  examples\n", "test_id",
                  id_width, "failed", "records", "rate");
  for (const auto& e : entries) {
    out += fmt::format("{:<{}}  {:>6}  {:>7}  {:>6.3f}  {}\n", e.test_id,
                       id_width, e.n_failed, e.n_records, e.failure_rate,
                       fmt::join(e.example_record_ids, ", "));
  }
  return out;
}

std::vector<std::string> error_mode_records(
    std::span<const ErrorModeEntry> entries) {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["test_id"] = e.test_id;
    j["n_failed"] = e.n_failed;
    j["n_records"] = e.n_records;
    j["failure_rate"] = e.failure_rate;
    j["example_record_ids"] = e.example_record_ids;
    out.push_back(j.dump());
  }
  return out;
}

}  // namespace lmeval
