#include "lmeval/aggregation.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lmeval/error.hpp"

namespace lmeval {

WeightStrategy parse_weight_strategy(std::string_view s) {
  if (s == "uniform") return WeightStrategy::uniform;
  if (s == "decaying") return WeightStrategy::decaying;
  if (s == "learned") return WeightStrategy::learned;
  if (s == "single") return WeightStrategy::single;
  throw Error(fmt::format(
      "unknown weight strategy '{}' (allowed: uniform, decaying, learned, "
      "single)",
      s));
}

std::string to_string(WeightStrategy strategy) {
  switch (strategy) {
    case WeightStrategy::uniform: return "uniform";
    case WeightStrategy::decaying: return "decaying";
    case WeightStrategy::learned: return "learned";
    case WeightStrategy::single: return "single";
  }
  throw Error("to_string: unknown weight strategy");
}

WeightVector make_weights(WeightStrategy strategy, std::size_t k,
                          double decay_base,
                          const std::optional<WeightVector>& learned,
                          std::optional<std::size_t> single_index) {
  if (k < 1) throw Error("make_weights: k must be >= 1");
  switch (strategy) {
    case WeightStrategy::uniform: {
      std::vector<double> w(k, 1.0 / static_cast<double>(k));
      return WeightVector(std::move(w));
    }
    case WeightStrategy::decaying: {
      if (!(decay_base > 0.0 && decay_base <= 1.0)) {
        throw Error(fmt::format("make_weights: decay base {} outside (0, 1]",
                                decay_base));
      }
      // First test gets decay_base^1, matching 1-based generation order.
      std::vector<double> w(k);
      double total = 0.0;
      for (std::size_t n = 0; n < k; ++n) {
        w[n] = std::pow(decay_base, static_cast<double>(n + 1));
        total += w[n];
      }
      for (double& x : w) x /= total;
      return WeightVector(std::move(w));
    }
    case WeightStrategy::single: {
      if (!single_index) {
        throw Error("make_weights: single strategy needs single_index");
      }
      if (*single_index >= k) {
        throw Error(fmt::format("make_weights: single index {} out of [0, {})",
                                *single_index, k));
      }
      std::vector<double> w(k, 0.0);
      w[*single_index] = 1.0;
      return WeightVector(std::move(w));
    }
    case WeightStrategy::learned: {
      if (!learned) {
        throw Error("make_weights: learned strategy needs a weight vector");
      }
      if (learned->size() != k) {
        throw Error(fmt::format(
            "make_weights: learned vector has {} weights, expected {}",
            learned->size(), k));
      }
      return *learned;  // WeightVector construction already validated it
    }
  }
  throw Error("make_weights: unreachable");
}

double aggregate(std::span<const double> expected_scores,
                 const WeightVector& weights) {
  if (expected_scores.size() != weights.size()) {
    throw Error(fmt::format("aggregate: {} scores vs {} weights",
                            expected_scores.size(), weights.size()));
  }
  const auto& w = weights.weights();
  bool all_equal = true;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] != w[0]) {
      all_equal = false;
      break;
    }
  }
  if (all_equal) {
    // Equal weights are exactly 1/k on the simplex; sum/k avoids the
    // per-term rounding of the dot product.
    double total = 0.0;
    for (double s : expected_scores) total += s;
    return total / static_cast<double>(expected_scores.size());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += w[i] * expected_scores[i];
  }
  return total;
}

double aggregate(std::span<const UnitTestResult> results,
                 const WeightVector& weights) {
  std::vector<double> scores;
  scores.reserve(results.size());
  for (const auto& r : results) scores.push_back(r.expected_score());
  return aggregate(scores, weights);
}

WeightVector restrict_weights(const WeightVector& weights,
                              const std::vector<bool>& present) {
  if (present.size() != weights.size()) {
    throw Error(fmt::format("restrict_weights: {} flags vs {} weights",
                            present.size(), weights.size()));
  }
  std::vector<double> kept;
  double total = 0.0;
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (present[i]) {
      kept.push_back(weights.weights()[i]);
      total += weights.weights()[i];
    }
  }
  if (kept.empty()) {
    throw Error("restrict_weights: no tests left after exclusions");
  }
  if (total <= 0.0) {
    throw Error("restrict_weights: surviving weights carry no mass");
  }
  for (double& w : kept) w /= total;
  return WeightVector(std::move(kept), weights.scope(), weights.scope_key());
}

PrefLabel pairwise_verdict(double agg_a, double agg_b, double tie_epsilon) {
  if (tie_epsilon < 0.0) {
    throw Error("pairwise_verdict: tie epsilon must be >= 0");
  }
  if (agg_a - agg_b > tie_epsilon) return PrefLabel::a;
  if (agg_b - agg_a > tie_epsilon) return PrefLabel::b;
  return PrefLabel::tie;
}

}  // namespace lmeval
