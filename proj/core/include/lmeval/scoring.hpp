#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lmeval/backend.hpp"
#include "lmeval/types.hpp"

namespace lmeval {

enum class RationaleMode { none, generate };

RationaleMode parse_rationale_mode(std::string_view s);

struct ScoringConfig {
  std::vector<int> support{1, 2, 3, 4, 5};
  RationaleMode rationale_mode = RationaleMode::none;
  double pass_threshold = 3.0;
  std::string prompt_template_id = "default-v1";

  void validate() const;
};

/// Message templates with {{placeholder}} slots. Stored as data so a
/// template id pins the exact prompt an evaluation run used.
struct PromptTemplate {
  std::string id;
  std::string system;
  std::string user;
  std::string direct_instruction;
  std::string rationale_instruction;
};

class TemplateRegistry {
 public:
  TemplateRegistry();

  void add(PromptTemplate tmpl);
  void load_file(const std::filesystem::path& path);
  const PromptTemplate& get(const std::string& id) const;

  static const TemplateRegistry& builtin();

 private:
  std::map<std::string, PromptTemplate> templates_;
};

/// Renders the scoring messages: test text, prompt and response verbatim
/// in fixed delimited sections, then the score instruction. Deterministic
/// for fixed inputs.
std::vector<ChatMessage> build_scoring_prompt(
    const UnitTest& test, const Exchange& exchange, const ScoringConfig& config,
    const TemplateRegistry& registry = TemplateRegistry::builtin());

/// Full backend request for one scoring call (messages plus logprob
/// parameters sized to the support).
BackendRequest build_scoring_request(
    const UnitTest& test, const Exchange& exchange, const ScoringConfig& config,
    const TemplateRegistry& registry = TemplateRegistry::builtin());

/// Probability-weighted mean over the support.
double expected_score(const ScoreDistribution& dist);

/// Scores one (test, prompt, response) triple through the backend.
/// Backend errors are rethrown tagged with the test id.
UnitTestResult score_unit_test(
    const UnitTest& test, const Exchange& exchange, Backend& backend,
    const ScoringConfig& config,
    const TemplateRegistry& registry = TemplateRegistry::builtin());

struct ScoringFailure {
  std::string test_id;
  std::string message;
};

struct SuiteScoringOutcome {
  std::vector<UnitTestResult> results;   // suite order, failures skipped
  std::vector<ScoringFailure> failures;  // suite order
};

/// Scores a whole suite; per-test failures become failure entries instead
/// of aborting the batch. Throws only when every test fails. Backend
/// calls fan out over at most `parallelism` threads; output order is
/// always suite order.
SuiteScoringOutcome score_suite(
    const TestSuite& suite, const Exchange& exchange, Backend& backend,
    const ScoringConfig& config, int parallelism = 1,
    const TemplateRegistry& registry = TemplateRegistry::builtin());

}  // namespace lmeval
