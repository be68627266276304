#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lmeval {

enum class TestScope { global, query };
enum class TestOrigin { builtin, human, generated };
enum class Weighting { uniform, decaying, learned };
enum class PrefLabel { a, b, tie };
enum class WeightScope { global, dataset, section };

std::string to_string(TestScope v);
std::string to_string(TestOrigin v);
std::string to_string(Weighting v);
std::string to_string(PrefLabel v);
std::string to_string(WeightScope v);

TestScope parse_test_scope(std::string_view s);
TestOrigin parse_test_origin(std::string_view s);
Weighting parse_weighting(std::string_view s);
PrefLabel parse_pref_label(std::string_view s);
WeightScope parse_weight_scope(std::string_view s);

/// One natural-language criterion, phrased as a yes/no question.
struct UnitTest {
  std::string id;
  std::string text;
  TestScope scope = TestScope::query;
  TestOrigin origin = TestOrigin::human;

  bool operator==(const UnitTest&) const = default;
};

/// Ordered collection of unit tests. Order matters: decaying weights
/// follow generation order.
struct TestSuite {
  std::string id;
  std::vector<UnitTest> tests;
  Weighting default_weighting = Weighting::uniform;
  double decay_base = 0.8;

  bool operator==(const TestSuite&) const = default;
};

/// A prompt/response pair under evaluation. The response may be empty
/// (a degenerate response is still scoreable); the prompt may not.
struct Exchange {
  std::string prompt;
  std::string response;

  bool operator==(const Exchange&) const = default;
};

struct PreferencePair {
  std::string prompt;
  std::string response_a;
  std::string response_b;
  PrefLabel label = PrefLabel::a;
  std::string dataset;
  std::optional<std::string> section;

  bool operator==(const PreferencePair&) const = default;
};

struct DirectRating {
  std::string prompt;
  std::string response;
  double gold_score = 0.0;
  double scale_min = 1.0;
  double scale_max = 5.0;
  std::optional<UnitTest> rubric;

  bool operator==(const DirectRating&) const = default;
};

/// Probability mass over the discrete score-token support. Construction
/// rejects probabilities that are negative or whose sum drifts from one
/// by more than kMassTolerance.
class ScoreDistribution {
 public:
  static constexpr double kMassTolerance = 1e-9;

  ScoreDistribution(std::vector<int> support, std::vector<double> probs);

  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const ScoreDistribution&) const = default;

 private:
  std::vector<int> support_;
  std::vector<double> probs_;
};

/// Outcome of running one unit test against one exchange.
class UnitTestResult {
 public:
  UnitTestResult(std::string test_id, ScoreDistribution distribution,
                 double expected_score, bool passed,
                 std::optional<std::string> rationale = std::nullopt);

  const std::string& test_id() const { return test_id_; }
  const ScoreDistribution& distribution() const { return distribution_; }
  double expected_score() const { return expected_score_; }
  bool passed() const { return passed_; }
  const std::optional<std::string>& rationale() const { return rationale_; }

  bool operator==(const UnitTestResult&) const = default;

 private:
  std::string test_id_;
  ScoreDistribution distribution_;
  double expected_score_;
  bool passed_;
  std::optional<std::string> rationale_;
};

/// Simplex-constrained aggregation weights over K unit tests.
class WeightVector {
 public:
  static constexpr double kSimplexTolerance = 1e-9;

  explicit WeightVector(std::vector<double> weights,
                        WeightScope scope = WeightScope::global,
                        std::optional<std::string> scope_key = std::nullopt);

  const std::vector<double>& weights() const { return weights_; }
  WeightScope scope() const { return scope_; }
  const std::optional<std::string>& scope_key() const { return scope_key_; }
  std::size_t size() const { return weights_.size(); }

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> weights_;
  WeightScope scope_;
  std::optional<std::string> scope_key_;
};

struct ValidationFinding {
  std::string test_id;  // empty for suite-level findings
  std::string rule;
  std::string message;

  bool operator==(const ValidationFinding&) const = default;
};

/// Checks every TestSuite/UnitTest invariant. Findings are data, not
/// failures: an empty list means the suite is valid.
std::vector<ValidationFinding> validate_suite(const TestSuite& suite);

/// The eight built-in coarse-grained global unit tests (GUT-1..GUT-8).
const TestSuite& builtin_global_suite();

}  // namespace lmeval
