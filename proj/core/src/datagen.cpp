#include "lmeval/datagen.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "jsonl_io.hpp"
#include "lmeval/error.hpp"
#include "lmeval/logging.hpp"
#include "record_json.hpp"
#include "text_util.hpp"

namespace lmeval {
namespace {

using detail::ordered_json;
using detail::require;
using detail::trim;

constexpr int kGenMaxTokens = 512;

constexpr char kTeacherSystem[] =
    "You produce training and evaluation data for a response evaluator. "
    "Follow the output format exactly.";

std::string support_range(std::span<const int> support) {
  if (support.empty()) throw Error("datagen: empty score support");
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (support[i] <= support[i - 1]) {
      throw Error("datagen: support must be strictly increasing");
    }
  }
  return fmt::format("{} to {}", support.front(), support.back());
}

bool in_support(int score, std::span<const int> support) {
  return std::find(support.begin(), support.end(), score) != support.end();
}

BackendRequest teacher_request(std::string user_text) {
  BackendRequest request;
  request.messages = {{"system", kTeacherSystem},
                      {"user", std::move(user_text)}};
  request.max_tokens = kGenMaxTokens;
  request.temperature = 0.0;
  return request;
}

bool is_question(std::string_view text) {
  const auto t = trim(text);
  return !t.empty() && t.back() == '?';
}

}  // namespace

std::vector<std::string> parse_numbered_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    line = trim(line);
    std::size_t cursor = 0;
    while (cursor < line.size() &&
           std::isdigit(static_cast<unsigned char>(line[cursor]))) {
      ++cursor;
    }
    if (cursor == 0 || cursor >= line.size()) continue;
    if (line[cursor] != '.' && line[cursor] != ')') continue;
    const auto item = trim(line.substr(cursor + 1));
    if (!item.empty()) items.emplace_back(item);
  }
  return items;
}

std::optional<ScoredRationale> parse_scored_rationale(std::string_view text) {
  static constexpr std::string_view kSentinel = "Score:";
  const std::size_t at = text.rfind(kSentinel);
  if (at == std::string_view::npos) return std::nullopt;

  std::string_view tail = text.substr(at + kSentinel.size());
  std::size_t cursor = 0;
  while (cursor < tail.size() &&
         std::isspace(static_cast<unsigned char>(tail[cursor]))) {
    ++cursor;
  }
  std::size_t digits = cursor;
  while (digits < tail.size() &&
         std::isdigit(static_cast<unsigned char>(tail[digits]))) {
    ++digits;
  }
  if (digits == cursor) return std::nullopt;

  ScoredRationale out;
  out.score = std::stoi(std::string(tail.substr(cursor, digits - cursor)));
  out.rationale = std::string(trim(text.substr(0, at)));
  return out;
}

BackendRequest build_testgen_request(const std::string& prompt,
                                     std::span<const std::string> responses,
                                     int n) {
  if (n < 1) throw Error("test generation: n must be >= 1");
  if (responses.size() > 2) {
    throw Error("test generation: at most two responses may steer generation");
  }
  std::string user = fmt::format(
      "Write {} unit tests for judging responses to the prompt below. Each "
      "unit test is one question about a single, specific quality of a "
      "response, answerable yes or no.\n\n[prompt]\n{}\n",
      n, prompt);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    user += fmt::format("\n[example response {}]\n{}\n", i + 1, responses[i]);
  }
  user += fmt::format(
      "\nReturn exactly {} questions as a numbered list, one per line, each "
      "ending with a question mark.",
      n);
  return teacher_request(std::move(user));
}

BackendRequest build_contrastive_request(const std::string& prompt,
                                         const UnitTest& test, int target_score,
                                         std::span<const int> support) {
  const std::string range = support_range(support);
  if (!in_support(target_score, support)) {
    throw Error(fmt::format("contrastive target {} outside support {}",
                            target_score, range));
  }
  return teacher_request(fmt::format(
      "Write one response to the prompt below that would earn a score of {} "
      "on a scale of {} against the unit test below, where {} means fully "
      "satisfied.\n\n[unit test]\n{}\n\n[prompt]\n{}\n\nReturn only the "
      "response text.",
      target_score, range, support.back(), test.text, prompt));
}

BackendRequest build_rationale_request(const UnitTest& test,
                                       const Exchange& exchange, int variant,
                                       std::span<const int> support) {
  const std::string range = support_range(support);
  return teacher_request(fmt::format(
      "Evaluate the response against the unit test. Reason step by step, "
      "then end your reply with \"Score: <n>\" where <n> is an integer from "
      "{}.\n\n[unit test]\n{}\n\n[prompt]\n{}\n\n[response]\n{}\n\n[sample]\n"
      "{}",
      range, test.text, exchange.prompt, exchange.response, variant));
}

BackendRequest build_revision_request(const UnitTest& test,
                                      const Exchange& exchange,
                                      const std::string& rationale,
                                      int gold_score, int round,
                                      std::span<const int> support) {
  const std::string range = support_range(support);
  if (!in_support(gold_score, support)) {
    throw Error(fmt::format("revision gold score {} outside support {}",
                            gold_score, range));
  }
  return teacher_request(fmt::format(
      "The rationale below reaches the wrong score for this response. "
      "Revise the reasoning so it correctly concludes with a score of {}. "
      "End your reply with \"Score: {}\".\n\n[unit test]\n{}\n\n[prompt]\n{}"
      "\n\n[response]\n{}\n\n[rationale]\n{}\n\n[revision round]\n{}",
      gold_score, gold_score, test.text, exchange.prompt, exchange.response,
      rationale, round));
}

BackendRequest build_harmonize_request(const UnitTest& test,
                                       const Exchange& exchange,
                                       const std::string& other_response,
                                       const std::string& own_rationale,
                                       const std::string& other_rationale,
                                       std::span<const int> support) {
  const std::string range = support_range(support);
  return teacher_request(fmt::format(
      "Two responses to the same prompt were evaluated separately against "
      "the unit test, and their rationales may be inconsistent with each "
      "other. Rewrite the rationale for the response below so the reasoning "
      "stays consistent when both responses are considered side by side. End "
      "your reply with \"Score: <n>\" where <n> is an integer from {}.\n\n"
      "[unit test]\n{}\n\n[prompt]\n{}\n\n[response]\n{}\n\n[other response]"
      "\n{}\n\n[rationale]\n{}\n\n[other rationale]\n{}",
      range, test.text, exchange.prompt, exchange.response, other_response,
      own_rationale, other_rationale));
}

GeneratedTests generate_unit_tests(const std::string& prompt,
                                   std::span<const std::string> responses,
                                   int n, Backend& teacher) {
  const BackendRequest request = build_testgen_request(prompt, responses, n);
  const BackendResponse response = teacher.complete(request);

  GeneratedTests out;
  out.n_requested = n;
  const auto candidates = parse_numbered_list(response.text);
  out.n_parsed = candidates.size();

  std::set<std::string> seen;
  for (const auto& candidate : candidates) {
    if (out.tests.size() == static_cast<std::size_t>(n)) break;
    if (!is_question(candidate)) continue;
    if (!seen.insert(detail::lower_ascii(candidate)).second) continue;
    UnitTest test;
    test.id = fmt::format("gen-{}", out.tests.size() + 1);
    test.text = candidate;
    test.scope = TestScope::query;
    test.origin = TestOrigin::generated;
    out.tests.push_back(std::move(test));
  }
  out.n_dropped = out.n_parsed - out.tests.size();
  out.shortfall = out.tests.size() < static_cast<std::size_t>(n);
  logging::info("generate_unit_tests",
                {{"requested", std::to_string(n)},
                 {"kept", std::to_string(out.tests.size())},
                 {"dropped", std::to_string(out.n_dropped)}});
  return out;
}

std::vector<ContrastiveResponse> generate_contrastive(
    const std::string& prompt, const UnitTest& test,
    std::span<const int> target_scores, std::span<const int> support,
    Backend& teacher) {
  if (target_scores.empty()) {
    throw Error("contrastive generation: no target scores");
  }
  std::vector<ContrastiveResponse> out;
  out.reserve(target_scores.size());
  for (int target : target_scores) {
    const BackendRequest request =
        build_contrastive_request(prompt, test, target, support);
    const BackendResponse response = teacher.complete(request);
    const auto text = trim(response.text);
    if (text.empty()) {
      throw Error(fmt::format(
          "contrastive generation returned empty text for target {}", target));
    }
    out.push_back({std::string(text), target});
  }
  return out;
}

std::vector<PreferencePair> contrastive_to_pairs(
    const std::string& prompt, std::span<const ContrastiveResponse> responses,
    const std::string& dataset) {
  std::vector<PreferencePair> out;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    for (std::size_t j = i + 1; j < responses.size(); ++j) {
      if (responses[i].target_score == responses[j].target_score) continue;
      PreferencePair pair;
      pair.prompt = prompt;
      pair.response_a = responses[i].response;
      pair.response_b = responses[j].response;
      pair.label = responses[i].target_score > responses[j].target_score
                       ? PrefLabel::a
                       : PrefLabel::b;
      pair.dataset = dataset;
      out.push_back(std::move(pair));
    }
  }
  return out;
}

RationaleOutcome generate_rationale_scored(const UnitTest& test,
                                           const Exchange& exchange,
                                           std::optional<int> seed_score,
                                           Backend& teacher, int max_attempts,
                                           std::span<const int> support,
                                           int variant_base) {
  if (max_attempts < 1) {
    throw Error("rationale generation: max_attempts must be >= 1");
  }
  RationaleOutcome out;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const BackendRequest request = build_rationale_request(
        test, exchange, variant_base + attempt, support);
    const BackendResponse response = teacher.complete(request);
    ++out.attempts;
    auto parsed = parse_scored_rationale(response.text);
    if (!parsed || !in_support(parsed->score, support)) {
      logging::info("rationale_unparseable",
                    {{"test_id", test.id},
                     {"attempt", std::to_string(attempt)}});
      continue;
    }
    if (seed_score && parsed->score != *seed_score) {
      logging::info("rationale_seed_mismatch",
                    {{"test_id", test.id},
                     {"parsed", std::to_string(parsed->score)},
                     {"seed", std::to_string(*seed_score)}});
      out.mismatched.push_back(std::move(*parsed));
      continue;
    }
    out.accepted = std::move(*parsed);
    return out;
  }
  if (out.mismatched.empty()) {
    throw Error(fmt::format(
        "test '{}': no attempt out of {} produced a parseable score",
        test.id, out.attempts));
  }
  return out;  // parsed fine, never matched the seed: a recorded rejection
}

PairStrategy parse_pair_strategy(std::string_view s) {
  if (s == "refined") return PairStrategy::refined;
  if (s == "harmonized") return PairStrategy::harmonized;
  if (s == "teacher") return PairStrategy::teacher;
  throw Error(fmt::format(
      "unknown pair strategy '{}' (allowed: refined, harmonized, teacher)",
      s));
}

std::string to_string(PairStrategy strategy) {
  switch (strategy) {
    case PairStrategy::refined: return "refined";
    case PairStrategy::harmonized: return "harmonized";
    case PairStrategy::teacher: return "teacher";
  }
  return "teacher";
}

void validate_rationale_pair(const RationalePair& pair,
                             std::span<const int> support) {
  if (pair.chosen_rationale.empty() || pair.rejected_rationale.empty()) {
    throw Error("rationale pair: empty rationale");
  }
  if (pair.chosen_rationale == pair.rejected_rationale) {
    throw Error("rationale pair: chosen and rejected are identical");
  }
  if (!in_support(pair.chosen_score, support)) {
    throw Error(fmt::format("rationale pair: chosen score {} outside support",
                            pair.chosen_score));
  }
}

namespace {

struct ItemOutcome {
  std::vector<RationalePair> pairs;
  std::vector<std::string> diagnostics;
  bool skipped = false;
  std::size_t dropped = 0;
};

RationalePair make_pair(const PairCollectionItem& item,
                        const std::string& response, PairStrategy strategy,
                        const ScoredRationale& chosen,
                        const ScoredRationale& rejected) {
  RationalePair pair;
  pair.unit_test_id = item.test.id;
  pair.prompt = item.prompt;
  pair.response = response;
  pair.chosen_rationale = chosen.rationale;
  pair.rejected_rationale = rejected.rationale;
  pair.strategy = strategy;
  pair.chosen_score = chosen.score;
  pair.rejected_score = rejected.score;
  return pair;
}

// Emits the pair unless a RationalePair invariant rejects it.
void emit_checked(ItemOutcome& out, std::size_t index, RationalePair pair,
                  std::span<const int> support) {
  try {
    validate_rationale_pair(pair, support);
    out.pairs.push_back(std::move(pair));
  } catch (const Error& e) {
    ++out.dropped;
    out.diagnostics.push_back(fmt::format("item {}: {}", index, e.what()));
  }
}

ItemOutcome collect_teacher(const PairCollectionItem& item, std::size_t index,
                            Backend& teacher, const CollectConfig& config) {
  ItemOutcome out;
  if (!item.gold_score || !in_support(*item.gold_score, config.support)) {
    out.skipped = true;
    out.diagnostics.push_back(fmt::format(
        "item {}: teacher strategy needs a gold score within the support",
        index));
    return out;
  }
  const Exchange exchange{item.prompt, item.response};
  std::vector<ScoredRationale> correct;
  std::vector<ScoredRationale> incorrect;
  std::size_t unparseable = 0;
  for (int sample = 0; sample < config.samples_per_item; ++sample) {
    try {
      auto outcome = generate_rationale_scored(item.test, exchange,
                                               std::nullopt, teacher, 1,
                                               config.support, sample);
      auto& scored = *outcome.accepted;
      (scored.score == *item.gold_score ? correct : incorrect)
          .push_back(std::move(scored));
    } catch (const Error&) {
      ++unparseable;
    }
  }
  if (unparseable > 0) {
    out.diagnostics.push_back(fmt::format(
        "item {}: {} of {} samples unparseable", index, unparseable,
        config.samples_per_item));
  }
  if (correct.empty()) {
    out.skipped = true;
    out.diagnostics.push_back(
        fmt::format("item {}: no chosen candidates", index));
    return out;
  }
  if (incorrect.empty()) {
    out.skipped = true;
    out.diagnostics.push_back(
        fmt::format("item {}: no rejected candidates", index));
    return out;
  }
  for (const auto& chosen : correct) {
    for (const auto& rejected : incorrect) {
      if (out.pairs.size() == config.max_pairs_per_item) return out;
      emit_checked(out, index,
                   make_pair(item, item.response, PairStrategy::teacher,
                             chosen, rejected),
                   config.support);
    }
  }
  return out;
}

ItemOutcome collect_refined(const PairCollectionItem& item, std::size_t index,
                            Backend& student, Backend& teacher,
                            const CollectConfig& config) {
  ItemOutcome out;
  if (!item.gold_score || !in_support(*item.gold_score, config.support)) {
    out.skipped = true;
    out.diagnostics.push_back(fmt::format(
        "item {}: refined strategy needs a gold score within the support",
        index));
    return out;
  }
  const Exchange exchange{item.prompt, item.response};
  const auto student_outcome = generate_rationale_scored(
      item.test, exchange, std::nullopt, student, 1, config.support, 0);
  const ScoredRationale& original = *student_outcome.accepted;
  if (original.score == *item.gold_score) {
    out.skipped = true;
    out.diagnostics.push_back(fmt::format(
        "item {}: student already reaches the gold score", index));
    return out;
  }

  std::string current = original.rationale;
  for (int round = 0; round < config.revision_rounds; ++round) {
    const BackendRequest request = build_revision_request(
        item.test, exchange, current, *item.gold_score, round, config.support);
    const BackendResponse response = teacher.complete(request);
    auto revised = parse_scored_rationale(response.text);
    if (!revised || !in_support(revised->score, config.support)) continue;
    if (revised->score == *item.gold_score) {
      emit_checked(out, index,
                   make_pair(item, item.response, PairStrategy::refined,
                             *revised, original),
                   config.support);
      return out;
    }
    current = revised->rationale;  // next round revises the latest attempt
  }
  ++out.dropped;
  out.diagnostics.push_back(fmt::format(
      "item {}: no revision reached the gold score within {} rounds", index,
      config.revision_rounds));
  return out;
}

ItemOutcome collect_harmonized(const PairCollectionItem& item,
                               std::size_t index, Backend& student,
                               Backend& teacher, const CollectConfig& config) {
  ItemOutcome out;
  if (!item.response_b || !item.label) {
    out.skipped = true;
    out.diagnostics.push_back(fmt::format(
        "item {}: harmonized strategy needs response_b and a label", index));
    return out;
  }
  if (*item.label == PrefLabel::tie) {
    out.skipped = true;
    out.diagnostics.push_back(
        fmt::format("item {}: tie label has no preferred side", index));
    return out;
  }
  const Exchange side_a{item.prompt, item.response};
  const Exchange side_b{item.prompt, *item.response_b};
  const auto student_a = *generate_rationale_scored(item.test, side_a,
                                                    std::nullopt, student, 1,
                                                    config.support, 0)
                              .accepted;
  const auto student_b = *generate_rationale_scored(item.test, side_b,
                                                    std::nullopt, student, 1,
                                                    config.support, 0)
                              .accepted;

  auto harmonize = [&](const Exchange& own, const std::string& other_response,
                       const ScoredRationale& own_rat,
                       const ScoredRationale& other_rat) {
    const BackendRequest request =
        build_harmonize_request(item.test, own, other_response,
                                own_rat.rationale, other_rat.rationale,
                                config.support);
    const BackendResponse response = teacher.complete(request);
    auto parsed = parse_scored_rationale(response.text);
    if (!parsed || !in_support(parsed->score, config.support)) {
      throw Error("harmonized rationale unparseable");
    }
    return *parsed;
  };

  ScoredRationale harmonized_a, harmonized_b;
  try {
    harmonized_a = harmonize(side_a, *item.response_b, student_a, student_b);
    harmonized_b = harmonize(side_b, item.response, student_b, student_a);
  } catch (const Error& e) {
    out.skipped = true;
    out.diagnostics.push_back(fmt::format("item {}: {}", index, e.what()));
    return out;
  }

  const bool a_preferred = *item.label == PrefLabel::a;
  const int preferred_score =
      a_preferred ? harmonized_a.score : harmonized_b.score;
  const int other_score = a_preferred ? harmonized_b.score : harmonized_a.score;
  if (preferred_score <= other_score) {
    ++out.dropped;
    out.diagnostics.push_back(fmt::format(
        "item {}: harmonized scores do not rank the preferred response first",
        index));
    return out;
  }
  emit_checked(out, index,
               make_pair(item, a_preferred ? item.response : *item.response_b,
                         PairStrategy::harmonized,
                         a_preferred ? harmonized_a : harmonized_b,
                         a_preferred ? student_a : student_b),
               config.support);
  return out;
}

ItemOutcome collect_one(PairStrategy strategy, const PairCollectionItem& item,
                        std::size_t index, Backend& student, Backend& teacher,
                        const CollectConfig& config) {
  try {
    switch (strategy) {
      case PairStrategy::teacher:
        return collect_teacher(item, index, teacher, config);
      case PairStrategy::refined:
        return collect_refined(item, index, student, teacher, config);
      case PairStrategy::harmonized:
        return collect_harmonized(item, index, student, teacher, config);
    }
    throw Error("unreachable strategy");
  } catch (const std::exception& e) {
    ItemOutcome out;
    out.skipped = true;
    out.diagnostics.push_back(fmt::format("item {}: {}", index, e.what()));
    return out;
  }
}

}  // namespace

CollectResult collect_rationale_pairs(PairStrategy strategy,
                                      std::span<const PairCollectionItem> items,
                                      Backend& student, Backend& teacher,
                                      const CollectConfig& config) {
  if (items.empty()) throw Error("pair collection: no input items");
  if (config.samples_per_item < 1 || config.revision_rounds < 1 ||
      config.max_pairs_per_item < 1 || config.parallelism < 1) {
    throw Error("pair collection: config counts must all be >= 1");
  }
  support_range(config.support);  // validates shape

  const std::size_t n = items.size();
  std::vector<ItemOutcome> outcomes(n);
  const auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      outcomes[i] =
          collect_one(strategy, items[i], i, student, teacher, config);
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), n);
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker, t, threads);
    }
    for (auto& thread : pool) thread.join();
  }

  CollectResult result;
  result.n_items = n;
  for (auto& outcome : outcomes) {
    if (outcome.skipped) ++result.n_skipped;
    result.n_dropped += outcome.dropped;
    for (auto& pair : outcome.pairs) result.pairs.push_back(std::move(pair));
    for (auto& diag : outcome.diagnostics) {
      result.diagnostics.push_back(std::move(diag));
    }
  }
  logging::info("collect_rationale_pairs",
                {{"strategy", to_string(strategy)},
                 {"items", std::to_string(result.n_items)},
                 {"pairs", std::to_string(result.pairs.size())},
                 {"skipped", std::to_string(result.n_skipped)},
                 {"dropped", std::to_string(result.n_dropped)}});
  return result;
}

namespace {

ordered_json rationale_pair_to_json(const RationalePair& p) {
  ordered_json j;
  j["unit_test_id"] = p.unit_test_id;
  j["prompt"] = p.prompt;
  j["response"] = p.response;
  j["chosen_rationale"] = p.chosen_rationale;
  j["rejected_rationale"] = p.rejected_rationale;
  j["strategy"] = to_string(p.strategy);
  j["chosen_score"] = p.chosen_score;
  j["rejected_score"] = p.rejected_score;
  return j;
}

RationalePair rationale_pair_from_json(const ordered_json& j) {
  RationalePair p;
  p.unit_test_id = require(j, "unit_test_id").get<std::string>();
  p.prompt = require(j, "prompt").get<std::string>();
  p.response = require(j, "response").get<std::string>();
  p.chosen_rationale = require(j, "chosen_rationale").get<std::string>();
  p.rejected_rationale = require(j, "rejected_rationale").get<std::string>();
  if (p.chosen_rationale == p.rejected_rationale) {
    throw Error("chosen and rejected rationales are identical");
  }
  p.strategy = parse_pair_strategy(require(j, "strategy").get<std::string>());
  p.chosen_score = require(j, "chosen_score").get<int>();
  p.rejected_score = require(j, "rejected_score").get<int>();
  return p;
}

ordered_json collection_item_to_json(const PairCollectionItem& item) {
  ordered_json j;
  j["test"] = detail::test_to_json(item.test);
  j["prompt"] = item.prompt;
  j["response"] = item.response;
  if (item.gold_score) j["gold_score"] = *item.gold_score;
  if (item.response_b) j["response_b"] = *item.response_b;
  if (item.label) j["label"] = to_string(*item.label);
  return j;
}

PairCollectionItem collection_item_from_json(const ordered_json& j) {
  PairCollectionItem item;
  item.test = detail::test_from_json(require(j, "test"));
  item.prompt = require(j, "prompt").get<std::string>();
  if (item.prompt.empty()) throw Error("field 'prompt' must be non-empty");
  item.response = require(j, "response").get<std::string>();
  if (auto it = j.find("gold_score"); it != j.end() && !it->is_null()) {
    item.gold_score = it->get<int>();
  }
  if (auto it = j.find("response_b"); it != j.end() && !it->is_null()) {
    item.response_b = it->get<std::string>();
  }
  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    item.label = parse_pref_label(it->get<std::string>());
  }
  return item;
}

ordered_json rationale_record_to_json(const RationaleRecord& r) {
  ordered_json j;
  j["unit_test_id"] = r.unit_test_id;
  j["prompt"] = r.prompt;
  j["response"] = r.response;
  j["rationale"] = r.rationale;
  j["score"] = r.score;
  return j;
}

RationaleRecord rationale_record_from_json(const ordered_json& j) {
  RationaleRecord r;
  r.unit_test_id = require(j, "unit_test_id").get<std::string>();
  r.prompt = require(j, "prompt").get<std::string>();
  r.response = require(j, "response").get<std::string>();
  r.rationale = require(j, "rationale").get<std::string>();
  r.score = require(j, "score").get<int>();
  return r;
}

}  // namespace

std::vector<RationalePair> load_rationale_pairs(
    const std::filesystem::path& path) {
  return detail::load_lines<RationalePair>(path, rationale_pair_from_json);
}

void save_rationale_pairs(std::span<const RationalePair> records,
                          const std::filesystem::path& path) {
  detail::save_lines(records, path, rationale_pair_to_json);
}

std::vector<PairCollectionItem> load_collection_items(
    const std::filesystem::path& path) {
  return detail::load_lines<PairCollectionItem>(path,
                                                collection_item_from_json);
}

void save_collection_items(std::span<const PairCollectionItem> records,
                           const std::filesystem::path& path) {
  detail::save_lines(records, path, collection_item_to_json);
}

std::vector<RationaleRecord> load_rationale_records(
    const std::filesystem::path& path) {
  return detail::load_lines<RationaleRecord>(path, rationale_record_from_json);
}

void save_rationale_records(std::span<const RationaleRecord> records,
                            const std::filesystem::path& path) {
  detail::save_lines(records, path, rationale_record_to_json);
}

}  // namespace lmeval
