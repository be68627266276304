#include "lmeval/scoring.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "lmeval/error.hpp"
#include "lmeval/logging.hpp"

namespace lmeval {
namespace {

constexpr char kDefaultSystem[] =
    "You are a meticulous evaluator. Judge the response against the given "
    "unit test criterion and nothing else.";

constexpr char kDefaultUser[] =
    "[unit test]\n{{test_text}}\n\n"
    "[prompt]\n{{prompt}}\n\n"
    "[response]\n{{response}}\n\n"
    "[task]\n"
    "Evaluate how well the response satisfies the unit test on a scale from "
    "{{support_min}} to {{support_max}}, where {{support_max}} means fully "
    "satisfied. {{instruction}}";

constexpr char kDefaultDirect[] =
    "Reply with a single score digit from {{support_min}} to "
    "{{support_max}} and nothing else.";

constexpr char kDefaultRationale[] =
    "Reason step by step, then give the score. End your reply with the "
    "score digit from {{support_min}} to {{support_max}} as the final "
    "token.";

void replace_all(std::string& text, std::string_view needle,
                 std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
}

std::string render(std::string tmpl,
                   const std::map<std::string, std::string>& slots) {
  for (const auto& [key, value] : slots) {
    replace_all(tmpl, "{{" + key + "}}", value);
  }
  return tmpl;
}

}  // namespace

RationaleMode parse_rationale_mode(std::string_view s) {
  if (s == "none") return RationaleMode::none;
  if (s == "generate") return RationaleMode::generate;
  throw Error(fmt::format(
      "unknown rationale mode '{}' (allowed: none, generate)", s));
}

void ScoringConfig::validate() const {
  if (support.empty()) throw Error("scoring config: empty support");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] > 9) {
      throw Error(fmt::format(
          "scoring config: support value {} is not a single digit",
          support[i]));
    }
    if (i > 0 && support[i] <= support[i - 1]) {
      throw Error("scoring config: support must be strictly increasing");
    }
  }
  if (pass_threshold < support.front() || pass_threshold > support.back()) {
    throw Error(fmt::format(
        "scoring config: pass threshold {} outside support [{}, {}]",
        pass_threshold, support.front(), support.back()));
  }
  if (prompt_template_id.empty()) {
    throw Error("scoring config: empty prompt template id");
  }
}

TemplateRegistry::TemplateRegistry() {
  add({"default-v1", kDefaultSystem, kDefaultUser, kDefaultDirect,
       kDefaultRationale});
}

void TemplateRegistry::add(PromptTemplate tmpl) {
  if (tmpl.id.empty()) throw Error("prompt template: empty id");
  templates_[tmpl.id] = std::move(tmpl);
}

void TemplateRegistry::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot open template file '{}'", path.string()));
  }
  nlohmann::json j;
  try {
    in >> j;
    // A file holds one template object or an array of them.
    const auto entries = j.is_array() ? j : nlohmann::json::array({j});
    for (const auto& entry : entries) {
      PromptTemplate tmpl;
      tmpl.id = entry.at("id").get<std::string>();
      tmpl.system = entry.at("system").get<std::string>();
      tmpl.user = entry.at("user").get<std::string>();
      tmpl.direct_instruction =
          entry.at("direct_instruction").get<std::string>();
      tmpl.rationale_instruction =
          entry.at("rationale_instruction").get<std::string>();
      add(std::move(tmpl));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("template file '{}': {}", path.string(), e.what()));
  }
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw Error(fmt::format("unknown prompt template id '{}'", id));
  }
  return it->second;
}

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry registry;
  return registry;
}

std::vector<ChatMessage> build_scoring_prompt(const UnitTest& test,
                                              const Exchange& exchange,
                                              const ScoringConfig& config,
                                              const TemplateRegistry& registry) {
  config.validate();
  if (exchange.prompt.empty()) {
    throw Error("scoring: exchange prompt is empty");
  }
  const PromptTemplate& tmpl = registry.get(config.prompt_template_id);
  const std::map<std::string, std::string> base_slots = {
      {"support_min", std::to_string(config.support.front())},
      {"support_max", std::to_string(config.support.back())},
  };
  const std::string instruction =
      render(config.rationale_mode == RationaleMode::generate
                 ? tmpl.rationale_instruction
                 : tmpl.direct_instruction,
             base_slots);
  std::map<std::string, std::string> slots = base_slots;
  slots["test_text"] = test.text;
  slots["prompt"] = exchange.prompt;
  slots["response"] = exchange.response;
  slots["instruction"] = instruction;
  return {{"system", render(tmpl.system, slots)},
          {"user", render(tmpl.user, slots)}};
}

BackendRequest build_scoring_request(const UnitTest& test,
                                     const Exchange& exchange,
                                     const ScoringConfig& config,
                                     const TemplateRegistry& registry) {
  BackendRequest request;
  request.messages = build_scoring_prompt(test, exchange, config, registry);
  request.max_tokens =
      config.rationale_mode == RationaleMode::generate ? 1024 : 4;
  request.temperature = 0.0;
  request.want_logprobs = true;
  request.top_logprobs =
      std::max<int>(static_cast<int>(config.support.size()), 10);
  return request;
}

double expected_score(const ScoreDistribution& dist) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.support().size(); ++i) {
    total += dist.support()[i] * dist.probs()[i];
  }
  return total;
}

UnitTestResult score_unit_test(const UnitTest& test, const Exchange& exchange,
                               Backend& backend, const ScoringConfig& config,
                               const TemplateRegistry& registry) {
  const auto started = std::chrono::steady_clock::now();
  try {
    BackendRequest request =
        build_scoring_request(test, exchange, config, registry);
    check_logprob_capacity(request, config.support.size());
    BackendResponse response = backend.complete(request);
    const TokenPosition position =
        config.rationale_mode == RationaleMode::generate
            ? TokenPosition::final_token
            : TokenPosition::first_token;
    ScoreDistribution dist =
        extract_score_distribution(response, config.support, position);
    const double score = expected_score(dist);
    const bool passed = score >= config.pass_threshold;
    std::optional<std::string> rationale;
    if (config.rationale_mode == RationaleMode::generate) {
      rationale = response.text;  // verbatim; never parsed for the score
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    logging::info("score_unit_test",
                  {{"test_id", test.id},
                   {"latency_ms", std::to_string(elapsed.count())},
                   {"expected_score", logging::field_str(score)},
                   {"passed", passed ? "true" : "false"}});
    return UnitTestResult(test.id, std::move(dist), score, passed,
                          std::move(rationale));
  } catch (const Error& e) {
    throw Error(fmt::format("test '{}': {}", test.id, e.what()));
  }
}

SuiteScoringOutcome score_suite(const TestSuite& suite, const Exchange& exchange,
                                Backend& backend, const ScoringConfig& config,
                                int parallelism,
                                const TemplateRegistry& registry) {
  if (auto findings = validate_suite(suite); !findings.empty()) {
    throw Error(fmt::format("suite '{}' invalid: {}", suite.id,
                            findings.front().message));
  }
  if (parallelism < 1) throw Error("score_suite: parallelism must be >= 1");

  const std::size_t n = suite.tests.size();
  std::vector<std::optional<UnitTestResult>> slots(n);
  std::vector<std::optional<std::string>> errors(n);

  const auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      try {
        slots[i] = score_unit_test(suite.tests[i], exchange, backend, config,
                                   registry);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), n);
  if (threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker, t, threads);
    }
    for (auto& th : pool) th.join();
  }

  SuiteScoringOutcome outcome;
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      outcome.results.push_back(std::move(*slots[i]));
    } else {
      outcome.failures.push_back({suite.tests[i].id, *errors[i]});
    }
  }
  if (outcome.results.empty()) {
    throw Error(fmt::format("all {} tests failed to score; first: {}", n,
                            outcome.failures.front().message));
  }
  return outcome;
}

}  // namespace lmeval
