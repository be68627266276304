#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lmeval/aggregation.hpp"
#include "lmeval/error.hpp"
#include "lmeval/rng.hpp"
#include "lmeval/types.hpp"

using namespace lmeval;

TEST_CASE("weight strategy names round-trip") {
  for (auto s : {WeightStrategy::uniform, WeightStrategy::decaying,
                 WeightStrategy::learned, WeightStrategy::single}) {
    CHECK(parse_weight_strategy(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_weight_strategy("heaviest"), Error);
}

TEST_CASE("uniform weights are exactly 1/k") {
  for (std::size_t k : {1u, 2u, 7u, 64u}) {
    const auto w = make_weights(WeightStrategy::uniform, k);
    REQUIRE(w.size() == k);
    for (double wi : w.weights()) CHECK(wi == 1.0 / static_cast<double>(k));
  }
  CHECK_THROWS_AS(make_weights(WeightStrategy::uniform, 0), Error);
}

TEST_CASE("decaying weights match the closed-form normalization") {
  const double base = 0.8;
  for (std::size_t k = 2; k <= 8; ++k) {
    const auto w = make_weights(WeightStrategy::decaying, k, base);
    // raw weight of the n-th test (1-based) is base^n
    double norm = 0.0;
    for (std::size_t n = 1; n <= k; ++n) {
      norm += std::pow(base, static_cast<double>(n));
    }
    for (std::size_t n = 0; n < k; ++n) {
      const double expect = std::pow(base, static_cast<double>(n + 1)) / norm;
      CHECK(w.weights()[n] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(std::is_sorted(w.weights().rbegin(), w.weights().rend()));
  }
  CHECK_THROWS_AS(make_weights(WeightStrategy::decaying, 3, 0.0), Error);
  CHECK_THROWS_AS(make_weights(WeightStrategy::decaying, 3, 1.2), Error);
  // base 1 degenerates to uniform
  const auto flat = make_weights(WeightStrategy::decaying, 4, 1.0);
  for (double wi : flat.weights()) CHECK(wi == doctest::Approx(0.25));
}

TEST_CASE("single weights are one-hot with bounds checking") {
  const auto w = make_weights(WeightStrategy::single, 4, 0.8, {}, 2);
  CHECK(w.weights() == std::vector<double>{0.0, 0.0, 1.0, 0.0});
  CHECK_THROWS_AS(make_weights(WeightStrategy::single, 4, 0.8, {}, 4), Error);
  CHECK_THROWS_AS(make_weights(WeightStrategy::single, 4, 0.8, {}, {}), Error);
}

TEST_CASE("learned weights pass through after validation") {
  const WeightVector learned({0.5, 0.25, 0.25});
  CHECK(make_weights(WeightStrategy::learned, 3, 0.8, learned) == learned);
  CHECK_THROWS_AS(make_weights(WeightStrategy::learned, 4, 0.8, learned),
                  Error);
  CHECK_THROWS_AS(make_weights(WeightStrategy::learned, 3, 0.8, {}), Error);
}

TEST_CASE("uniform aggregation is the arithmetic mean, bit for bit") {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng.bounded(9);
    std::vector<double> scores(k);
    for (auto& s : scores) s = rng.uniform(1.0, 5.0);
    const auto w = make_weights(WeightStrategy::uniform, k);
    double sum = 0.0;
    for (double s : scores) sum += s;
    CHECK(aggregate(scores, w) == sum / static_cast<double>(k));
  }
}

TEST_CASE("weighted aggregation matches the dot product") {
  const WeightVector w({0.5, 0.3, 0.2});
  const std::vector<double> scores{4.0, 2.0, 1.0};
  CHECK(aggregate(scores, w) == doctest::Approx(2.0 + 0.6 + 0.2).epsilon(1e-12));
  const std::vector<double> wrong_k{1.0, 2.0};
  CHECK_THROWS_AS(aggregate(wrong_k, w), Error);
}

TEST_CASE("aggregation accepts unit-test results directly") {
  std::vector<UnitTestResult> results{
      UnitTestResult("t1", ScoreDistribution({1, 2}, {0.0, 1.0}), 2.0, false),
      UnitTestResult("t2", ScoreDistribution({1, 2}, {0.5, 0.5}), 1.5, false)};
  const auto w = make_weights(WeightStrategy::uniform, 2);
  CHECK(aggregate(results, w) == 1.75);
}

TEST_CASE("aggregation is permutation invariant") {
  Rng rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.bounded(6);
    std::vector<double> scores(k), raw(k);
    for (auto& s : scores) s = rng.uniform(1.0, 5.0);
    for (auto& r : raw) r = rng.uniform(0.05, 1.0);
    const double norm = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (auto& r : raw) r /= norm;
    // renormalize exactly enough for the simplex check
    raw.back() = 1.0 - std::accumulate(raw.begin(), raw.end() - 1, 0.0);

    const auto perm = shuffled_indices(k, 1000 + static_cast<std::uint64_t>(trial));
    std::vector<double> pscores(k), praw(k);
    for (std::size_t i = 0; i < k; ++i) {
      pscores[i] = scores[perm[i]];
      praw[i] = raw[perm[i]];
    }
    const double direct = aggregate(scores, WeightVector(raw));
    const double permuted = aggregate(pscores, WeightVector(praw));
    CHECK(direct == doctest::Approx(permuted).epsilon(1e-12));
  }
}

TEST_CASE("restrict_weights renormalizes the survivors") {
  const WeightVector w({0.5, 0.3, 0.2});
  const auto restricted = restrict_weights(w, {true, false, true});
  REQUIRE(restricted.size() == 2);
  CHECK(restricted.weights()[0] == doctest::Approx(0.5 / 0.7).epsilon(1e-12));
  CHECK(restricted.weights()[1] == doctest::Approx(0.2 / 0.7).epsilon(1e-12));

  CHECK_THROWS_AS(restrict_weights(w, {false, false, false}), Error);
  // surviving mass must be positive
  const WeightVector hot({1.0, 0.0});
  CHECK_THROWS_AS(restrict_weights(hot, {false, true}), Error);
  // mask length must match
  CHECK_THROWS_AS(restrict_weights(w, {true, true}), Error);
}

TEST_CASE("pairwise verdict honours the tie margin") {
  CHECK(pairwise_verdict(3.2, 3.0, 0.1) == PrefLabel::a);
  CHECK(pairwise_verdict(3.0, 3.2, 0.1) == PrefLabel::b);
  CHECK(pairwise_verdict(3.05, 3.0, 0.1) == PrefLabel::tie);
  CHECK(pairwise_verdict(3.0, 3.0, 0.0) == PrefLabel::tie);
  // margin exactly epsilon is still a tie (strict inequality); the margin
  // is dyadic so the boundary is exact in binary
  CHECK(pairwise_verdict(3.25, 3.0, 0.25) == PrefLabel::tie);
}

TEST_CASE("pairwise verdict mirror symmetry") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = rng.uniform(1.0, 5.0);
    const double b = rng.uniform(1.0, 5.0);
    const double eps = rng.uniform(0.0, 0.2);
    const PrefLabel forward = pairwise_verdict(a, b, eps);
    const PrefLabel mirrored = pairwise_verdict(b, a, eps);
    if (forward == PrefLabel::a) CHECK(mirrored == PrefLabel::b);
    if (forward == PrefLabel::b) CHECK(mirrored == PrefLabel::a);
    if (forward == PrefLabel::tie) CHECK(mirrored == PrefLabel::tie);
  }
}
