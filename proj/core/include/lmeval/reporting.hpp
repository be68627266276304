#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

/// One strategy's metric per section, plus the digest of the record set it
/// was evaluated on. Strategies are only comparable on identical records.
struct StrategyMetrics {
  std::map<std::string, double> by_section;
  std::string records_digest;
};

struct StrategyTable {
  std::vector<std::string> strategies;  // presentation (input) order
  std::vector<std::string> sections;    // sorted
  std::vector<std::vector<double>> cells;  // [strategy][section]
  std::vector<double> averages;            // unweighted mean per strategy
};

/// Builds the strategy x section comparison. Throws when digests differ or
/// the strategies cover different sections.
StrategyTable strategy_table(
    std::span<const std::pair<std::string, StrategyMetrics>> results);

/// Aligned plain-text rendering, deterministic for identical input.
std::string format_strategy_table(const StrategyTable& table);

/// Machine-readable one-line-JSON cells (section cells plus one "average"
/// line per strategy).
std::vector<std::string> strategy_table_records(const StrategyTable& table);

struct ErrorModeEntry {
  std::string test_id;
  std::size_t n_failed = 0;
  std::size_t n_records = 0;
  double failure_rate = 0.0;
  std::vector<std::string> example_record_ids;  // failing records, capped

  bool operator==(const ErrorModeEntry&) const = default;
};

/// Per-test failure rates across records, sorted by descending rate with
/// ties broken by test id. Every record must carry results for the same
/// set of tests.
std::vector<ErrorModeEntry> error_mode_summary(
    std::span<const std::vector<UnitTestResult>> per_record_results,
    std::span<const std::string> record_ids, std::size_t max_examples = 3);

std::string format_error_modes(std::span<const ErrorModeEntry> entries);

std::vector<std::string> error_mode_records(
    std::span<const ErrorModeEntry> entries);

}  // namespace lmeval
