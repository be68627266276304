// Microbenchmarks for the hot paths: distribution extraction, aggregation,
// the optimizer objective, the optimizer itself, and kappa.

#include <cmath>
#include <cstddef>
#include <vector>

#include <benchmark/benchmark.h>

#include "lmeval/aggregation.hpp"
#include "lmeval/backend.hpp"
#include "lmeval/metrics.hpp"
#include "lmeval/rng.hpp"
#include "lmeval/scoring.hpp"
#include "lmeval/types.hpp"
#include "lmeval/weightopt.hpp"

namespace {

using namespace lmeval;

std::vector<ScoredPair> synthetic_pairs(std::size_t n) {
  Rng rng(17);
  std::vector<ScoredPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double base = rng.uniform(1.5, 4.5);
    const double delta = rng.uniform(0.4, 1.0) * (rng.coin() ? 1.0 : -1.0);
    ScoredPair pair;
    pair.scores_a = {base + delta / 2, rng.uniform(1.0, 5.0),
                     rng.uniform(1.0, 5.0)};
    pair.scores_b = {base - delta / 2, rng.uniform(1.0, 5.0),
                     rng.uniform(1.0, 5.0)};
    pair.label = delta > 0 ? PrefLabel::a : PrefLabel::b;
    pair.dataset = "bench";
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void BM_ExtractScoreDistribution(benchmark::State& state) {
  BackendResponse response;
  response.text = "3";
  TokenLogprobs position;
  position["1"] = std::log(0.1);
  position["2"] = std::log(0.2);
  position["3"] = std::log(0.4);
  position["4"] = std::log(0.2);
  position["5"] = std::log(0.1);
  response.token_logprobs = std::vector<TokenLogprobs>{position};
  const std::vector<int> support{1, 2, 3, 4, 5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_score_distribution(
        response, support, TokenPosition::final_token));
  }
}
BENCHMARK(BM_ExtractScoreDistribution);

void BM_BuildScoringRequest(benchmark::State& state) {
  UnitTest test;
  test.id = "gut-1";
  test.text = "Is the response helpful?";
  const Exchange exchange{"Summarize the quarterly report.",
                          "Revenue rose while costs held flat."};
  const ScoringConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_scoring_request(test, exchange, config));
  }
}
BENCHMARK(BM_BuildScoringRequest);

void BM_Aggregate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<double> scores(k);
  for (auto& s : scores) s = rng.uniform(1.0, 5.0);
  const WeightVector weights = make_weights(WeightStrategy::decaying, k, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(scores, weights));
  }
}
BENCHMARK(BM_Aggregate)->Arg(4)->Arg(8)->Arg(32);

void BM_AgreementObjective(benchmark::State& state) {
  const auto pairs = synthetic_pairs(static_cast<std::size_t>(state.range(0)));
  const WeightVector weights = make_weights(WeightStrategy::uniform, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agreement_objective(pairs, weights, 1e-9));
  }
}
BENCHMARK(BM_AgreementObjective)->Arg(100)->Arg(500);

void BM_OptimizeWeights(benchmark::State& state) {
  const auto pairs = synthetic_pairs(200);
  WeightOptConfig config;
  config.n_random = 64;
  config.n_rounds = 2;
  config.proposals_per_round = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_weights(pairs, 3, config));
  }
}
BENCHMARK(BM_OptimizeWeights);

void BM_FleissKappa(benchmark::State& state) {
  Rng rng(9);
  const std::size_t n_items = 50;
  const std::size_t n_cats = 4;
  const int raters = 5;
  std::vector<std::vector<int>> counts(n_items, std::vector<int>(n_cats, 0));
  for (auto& row : counts) {
    for (int r = 0; r < raters; ++r) row[rng.bounded(n_cats)]++;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fleiss_kappa(counts, raters));
  }
}
BENCHMARK(BM_FleissKappa);

}  // namespace

BENCHMARK_MAIN();
