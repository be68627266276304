#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lmeval/error.hpp"
#include "lmeval/rng.hpp"
#include "lmeval/types.hpp"

namespace lmeval {

/// A preference pair reduced to per-test expected scores, ready for
/// weight learning.
struct ScoredPair {
  std::vector<double> scores_a;
  std::vector<double> scores_b;
  PrefLabel label = PrefLabel::a;
  std::string dataset;
  std::optional<std::string> section;

  bool operator==(const ScoredPair&) const = default;
};

std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path);
void save_scored_pairs(std::span<const ScoredPair> records,
                       const std::filesystem::path& path);

struct WeightOptConfig {
  int n_random = 256;
  int n_rounds = 8;
  int proposals_per_round = 64;
  double concentration = 50.0;
  std::uint64_t seed = 0;
  double tie_epsilon = 1e-9;
  std::size_t min_pairs_per_scope = 10;

  void validate() const;
  /// Stable hex digest over every field, stamped into learned-weight
  /// records so a weights file can be traced to its search settings.
  std::string digest() const;

  bool operator==(const WeightOptConfig&) const = default;
};

/// Fraction of pairs whose weighted verdict matches the label.
double agreement_objective(std::span<const ScoredPair> pairs,
                           const WeightVector& weights, double tie_epsilon);

struct OptimizedWeights {
  WeightVector weights;
  double agreement = 0.0;
};

/// Seeded simplex search: uniform incumbent, n_random symmetric Dirichlet
/// draws, then n_rounds batches of Dirichlet proposals centered on the
/// incumbent. Deterministic given the seed; never returns agreement below
/// the uniform baseline.
OptimizedWeights optimize_weights(std::span<const ScoredPair> pairs,
                                  std::size_t k,
                                  const WeightOptConfig& config);

struct ScopedWeights {
  WeightVector weights;
  double agreement = 0.0;
  std::size_t n_pairs = 0;
  bool fell_back_to_global = false;
};

/// One optimization per scope key. Keys with fewer than
/// config.min_pairs_per_scope pairs receive the global vector instead,
/// with the fallback flagged.
std::map<std::string, ScopedWeights> optimize_scoped(
    std::span<const ScoredPair> pairs, std::size_t k, WeightScope scope,
    const WeightOptConfig& config);

/// Deterministic shuffle-split; both sides preserve input order.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_records(
    std::span<const T> records, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error("split: fraction must lie strictly between 0 and 1");
  }
  auto order = shuffled_indices(records.size(), seed);
  const auto n_train = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(records.size())));
  std::vector<bool> in_train(records.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_train[i] ? out.first : out.second).push_back(records[i]);
  }
  return out;
}

inline std::pair<std::vector<ScoredPair>, std::vector<ScoredPair>> split_pairs(
    std::span<const ScoredPair> pairs, double fraction, std::uint64_t seed) {
  return split_records(pairs, fraction, seed);
}

/// Serialized form of one learned weight vector.
struct LearnedWeightsRecord {
  std::string scope;
  std::string scope_key;
  std::vector<double> weights;
  double achieved_agreement = 0.0;
  std::string config_digest;
  std::uint64_t seed = 0;

  bool operator==(const LearnedWeightsRecord&) const = default;
};

std::vector<LearnedWeightsRecord> load_learned_weights(
    const std::filesystem::path& path);
void save_learned_weights(std::span<const LearnedWeightsRecord> records,
                          const std::filesystem::path& path);

/// Flattens an optimize_scoped result for serialization, keyed in map
/// (sorted) order.
std::vector<LearnedWeightsRecord> to_records(
    const std::map<std::string, ScopedWeights>& scoped, WeightScope scope,
    const WeightOptConfig& config);

/// Picks the record for a scope key, falling back to a "global" record
/// when the key is absent. Throws when neither exists.
const LearnedWeightsRecord& select_record(
    std::span<const LearnedWeightsRecord> records, WeightScope scope,
    const std::string& scope_key);

}  // namespace lmeval
