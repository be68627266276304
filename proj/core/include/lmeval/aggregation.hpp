#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

enum class WeightStrategy { uniform, decaying, learned, single };

WeightStrategy parse_weight_strategy(std::string_view s);
std::string to_string(WeightStrategy strategy);

/// Builds aggregation weights for K tests.
///   uniform  - 1/k each
///   decaying - weight of the n-th test (1-based) proportional to
///              decay_base^n, normalized
///   single   - one-hot at single_index
///   learned  - passthrough after simplex validation
WeightVector make_weights(WeightStrategy strategy, std::size_t k,
                          double decay_base = 0.8,
                          const std::optional<WeightVector>& learned = {},
                          std::optional<std::size_t> single_index = {});

/// Weighted sum of per-test expected scores. Equal weights take the exact
/// mean path so uniform aggregation matches the arithmetic mean bit for
/// bit.
double aggregate(std::span<const double> expected_scores,
                 const WeightVector& weights);
double aggregate(std::span<const UnitTestResult> results,
                 const WeightVector& weights);

/// Drops excluded tests and renormalizes the remaining weights; used when
/// some tests failed to score. Throws when nothing scoreable remains or
/// the surviving weights carry no mass.
WeightVector restrict_weights(const WeightVector& weights,
                              const std::vector<bool>& present);

/// a if agg_a - agg_b > tie_epsilon, b if agg_b - agg_a > tie_epsilon,
/// tie otherwise.
PrefLabel pairwise_verdict(double agg_a, double agg_b, double tie_epsilon);

}  // namespace lmeval
