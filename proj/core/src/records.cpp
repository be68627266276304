#include "lmeval/records.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "jsonl_io.hpp"
#include "lmeval/error.hpp"
#include "record_json.hpp"

namespace lmeval {

namespace detail {

ordered_json test_to_json(const UnitTest& t) {
  ordered_json j;
  j["id"] = t.id;
  j["text"] = t.text;
  j["scope"] = to_string(t.scope);
  j["origin"] = to_string(t.origin);
  return j;
}

UnitTest test_from_json(const ordered_json& j) {
  UnitTest t;
  t.id = require(j, "id").get<std::string>();
  t.text = require(j, "text").get<std::string>();
  t.scope = parse_test_scope(require(j, "scope").get<std::string>());
  t.origin = parse_test_origin(require(j, "origin").get<std::string>());
  return t;
}

}  // namespace detail

namespace {

using detail::load_lines;
using detail::ordered_json;
using detail::require;
using detail::save_lines;
using detail::test_from_json;
using detail::test_to_json;

// --- json encoding, field order fixed by insertion order ---

ordered_json pair_to_json(const PreferencePair& p) {
  ordered_json j;
  j["prompt"] = p.prompt;
  j["response_a"] = p.response_a;
  j["response_b"] = p.response_b;
  j["label"] = to_string(p.label);
  j["dataset"] = p.dataset;
  if (p.section) j["section"] = *p.section;
  return j;
}

ordered_json rating_to_json(const DirectRating& r) {
  ordered_json j;
  j["prompt"] = r.prompt;
  j["response"] = r.response;
  j["gold_score"] = r.gold_score;
  j["scale_min"] = r.scale_min;
  j["scale_max"] = r.scale_max;
  if (r.rubric) j["rubric"] = test_to_json(*r.rubric);
  return j;
}

ordered_json suite_to_json(const TestSuite& s) {
  ordered_json j;
  j["id"] = s.id;
  j["tests"] = ordered_json::array();
  for (const auto& t : s.tests) j["tests"].push_back(test_to_json(t));
  j["default_weighting"] = to_string(s.default_weighting);
  j["decay_base"] = s.decay_base;
  return j;
}

ordered_json result_to_json(const UnitTestResult& r) {
  ordered_json j;
  j["test_id"] = r.test_id();
  j["support"] = r.distribution().support();
  j["probs"] = r.distribution().probs();
  j["expected_score"] = r.expected_score();
  j["passed"] = r.passed();
  if (r.rationale()) j["rationale"] = *r.rationale();
  return j;
}

// --- json decoding with field checks ---

PreferencePair pair_from_json(const ordered_json& j) {
  PreferencePair p;
  p.prompt = require(j, "prompt").get<std::string>();
  if (p.prompt.empty()) throw Error("field 'prompt' must be non-empty");
  p.response_a = require(j, "response_a").get<std::string>();
  p.response_b = require(j, "response_b").get<std::string>();
  p.label = parse_pref_label(require(j, "label").get<std::string>());
  p.dataset = require(j, "dataset").get<std::string>();
  if (auto it = j.find("section"); it != j.end() && !it->is_null()) {
    p.section = it->get<std::string>();
    if (p.section->empty()) {
      throw Error("field 'section' must be non-empty when present");
    }
  }
  return p;
}

DirectRating rating_from_json(const ordered_json& j) {
  DirectRating r;
  r.prompt = require(j, "prompt").get<std::string>();
  if (r.prompt.empty()) throw Error("field 'prompt' must be non-empty");
  r.response = require(j, "response").get<std::string>();
  r.gold_score = require(j, "gold_score").get<double>();
  r.scale_min = require(j, "scale_min").get<double>();
  r.scale_max = require(j, "scale_max").get<double>();
  if (!(r.scale_min <= r.gold_score && r.gold_score <= r.scale_max)) {
    throw Error(fmt::format("gold score {} outside scale [{}, {}]",
                            r.gold_score, r.scale_min, r.scale_max));
  }
  if (auto it = j.find("rubric"); it != j.end() && !it->is_null()) {
    r.rubric = test_from_json(*it);
  }
  return r;
}

TestSuite suite_from_json(const ordered_json& j) {
  TestSuite s;
  s.id = require(j, "id").get<std::string>();
  for (const auto& t : require(j, "tests")) {
    s.tests.push_back(test_from_json(t));
  }
  s.default_weighting =
      parse_weighting(require(j, "default_weighting").get<std::string>());
  s.decay_base = require(j, "decay_base").get<double>();
  if (auto findings = validate_suite(s); !findings.empty()) {
    throw Error(fmt::format("suite '{}' invalid: {}", s.id,
                            findings.front().message));
  }
  return s;
}

UnitTestResult result_from_json(const ordered_json& j) {
  auto support = require(j, "support").get<std::vector<int>>();
  auto probs = require(j, "probs").get<std::vector<double>>();
  std::optional<std::string> rationale;
  if (auto it = j.find("rationale"); it != j.end() && !it->is_null()) {
    rationale = it->get<std::string>();
  }
  return UnitTestResult(
      require(j, "test_id").get<std::string>(),
      ScoreDistribution(std::move(support), std::move(probs)),
      require(j, "expected_score").get<double>(),
      require(j, "passed").get<bool>(), std::move(rationale));
}

}  // namespace

RecordKind parse_record_kind(std::string_view s) {
  if (s == "pairs") return RecordKind::pairs;
  if (s == "ratings") return RecordKind::ratings;
  if (s == "suite") return RecordKind::suite;
  if (s == "results") return RecordKind::results;
  throw Error(fmt::format(
      "unknown record kind '{}' (allowed: pairs, ratings, suite, results)",
      s));
}

std::string to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::pairs: return "pairs";
    case RecordKind::ratings: return "ratings";
    case RecordKind::suite: return "suite";
    case RecordKind::results: return "results";
  }
  return "pairs";
}

std::vector<PreferencePair> load_pairs(const std::filesystem::path& path) {
  return load_lines<PreferencePair>(path, pair_from_json);
}

std::vector<DirectRating> load_ratings(const std::filesystem::path& path) {
  return load_lines<DirectRating>(path, rating_from_json);
}

std::vector<TestSuite> load_suites(const std::filesystem::path& path) {
  return load_lines<TestSuite>(path, suite_from_json);
}

std::vector<UnitTestResult> load_results(const std::filesystem::path& path) {
  return load_lines<UnitTestResult>(path, result_from_json);
}

void save_pairs(std::span<const PreferencePair> records,
                const std::filesystem::path& path) {
  save_lines(records, path, pair_to_json);
}

void save_ratings(std::span<const DirectRating> records,
                  const std::filesystem::path& path) {
  save_lines(records, path, rating_to_json);
}

void save_suites(std::span<const TestSuite> records,
                 const std::filesystem::path& path) {
  save_lines(records, path, suite_to_json);
}

void save_results(std::span<const UnitTestResult> records,
                  const std::filesystem::path& path) {
  save_lines(records, path, result_to_json);
}

TestSuite load_suite(const std::filesystem::path& path) {
  auto suites = load_suites(path);
  if (suites.size() != 1) {
    throw Error(fmt::format("'{}' holds {} suites, expected exactly 1",
                            path.string(), suites.size()));
  }
  return std::move(suites.front());
}

std::size_t count_records(const std::filesystem::path& path, RecordKind kind) {
  switch (kind) {
    case RecordKind::pairs: return load_pairs(path).size();
    case RecordKind::ratings: return load_ratings(path).size();
    case RecordKind::suite: return load_suites(path).size();
    case RecordKind::results: return load_results(path).size();
  }
  return 0;
}

}  // namespace lmeval
