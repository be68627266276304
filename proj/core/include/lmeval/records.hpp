#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

enum class RecordKind { pairs, ratings, suite, results };

RecordKind parse_record_kind(std::string_view s);
std::string to_string(RecordKind kind);

// Line-delimited record files, one JSON object per line, UTF-8. Loaders
// enforce type invariants and report the offending line on failure.
// Writers are byte-stable: fixed field order, shortest round-trip float
// formatting, one trailing newline per record.

std::vector<PreferencePair> load_pairs(const std::filesystem::path& path);
std::vector<DirectRating> load_ratings(const std::filesystem::path& path);
std::vector<TestSuite> load_suites(const std::filesystem::path& path);
std::vector<UnitTestResult> load_results(const std::filesystem::path& path);

void save_pairs(std::span<const PreferencePair> records,
                const std::filesystem::path& path);
void save_ratings(std::span<const DirectRating> records,
                  const std::filesystem::path& path);
void save_suites(std::span<const TestSuite> records,
                 const std::filesystem::path& path);
void save_results(std::span<const UnitTestResult> records,
                  const std::filesystem::path& path);

/// Loads a suite file expected to hold exactly one suite.
TestSuite load_suite(const std::filesystem::path& path);

/// Number of records of the given kind in a file (validates as it counts).
std::size_t count_records(const std::filesystem::path& path, RecordKind kind);

}  // namespace lmeval
