#include "lmeval/weightopt.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hash.hpp"
#include "jsonl_io.hpp"
#include "lmeval/aggregation.hpp"
#include "lmeval/logging.hpp"

namespace lmeval {
namespace {

using detail::ordered_json;
using detail::require;

ordered_json scored_pair_to_json(const ScoredPair& p) {
  ordered_json j;
  j["scores_a"] = p.scores_a;
  j["scores_b"] = p.scores_b;
  j["label"] = to_string(p.label);
  j["dataset"] = p.dataset;
  if (p.section) j["section"] = *p.section;
  return j;
}

ScoredPair scored_pair_from_json(const ordered_json& j) {
  ScoredPair p;
  p.scores_a = require(j, "scores_a").get<std::vector<double>>();
  p.scores_b = require(j, "scores_b").get<std::vector<double>>();
  if (p.scores_a.size() != p.scores_b.size()) {
    throw Error(fmt::format("scores_a has {} entries, scores_b has {}",
                            p.scores_a.size(), p.scores_b.size()));
  }
  if (p.scores_a.empty()) throw Error("scored pair carries no test scores");
  p.label = parse_pref_label(require(j, "label").get<std::string>());
  p.dataset = require(j, "dataset").get<std::string>();
  if (auto it = j.find("section"); it != j.end() && !it->is_null()) {
    p.section = it->get<std::string>();
  }
  return p;
}

void check_dimensions(std::span<const ScoredPair> pairs, std::size_t k) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].scores_a.size() != k || pairs[i].scores_b.size() != k) {
      throw Error(fmt::format(
          "pair {}: expected {} per-test scores, found {}/{}", i, k,
          pairs[i].scores_a.size(), pairs[i].scores_b.size()));
    }
  }
}

}  // namespace

std::vector<ScoredPair> load_scored_pairs(const std::filesystem::path& path) {
  return detail::load_lines<ScoredPair>(path, scored_pair_from_json);
}

void save_scored_pairs(std::span<const ScoredPair> records,
                       const std::filesystem::path& path) {
  detail::save_lines(records, path, scored_pair_to_json);
}

void WeightOptConfig::validate() const {
  if (n_random < 1 || n_rounds < 1 || proposals_per_round < 1) {
    throw Error("weight search counts must all be >= 1");
  }
  if (!(concentration > 0.0)) {
    throw Error("concentration must be positive");
  }
  if (tie_epsilon < 0.0) throw Error("tie epsilon must be >= 0");
}

std::string WeightOptConfig::digest() const {
  return detail::fnv1a64_hex(fmt::format(
      "n_random={};n_rounds={};proposals_per_round={};concentration={:.17g};"
      "seed={};tie_epsilon={:.17g};min_pairs_per_scope={}",
      n_random, n_rounds, proposals_per_round, concentration, seed,
      tie_epsilon, min_pairs_per_scope));
}

double agreement_objective(std::span<const ScoredPair> pairs,
                           const WeightVector& weights, double tie_epsilon) {
  if (pairs.empty()) throw Error("agreement objective undefined on 0 pairs");
  check_dimensions(pairs, weights.size());
  std::size_t hits = 0;
  for (const auto& pair : pairs) {
    const double agg_a = aggregate(pair.scores_a, weights);
    const double agg_b = aggregate(pair.scores_b, weights);
    if (pairwise_verdict(agg_a, agg_b, tie_epsilon) == pair.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

OptimizedWeights optimize_weights(std::span<const ScoredPair> pairs,
                                  std::size_t k,
                                  const WeightOptConfig& config) {
  config.validate();
  if (pairs.empty()) throw Error("cannot optimize weights on 0 pairs");
  if (k < 1) throw Error("optimize_weights: k must be >= 1");
  check_dimensions(pairs, k);

  WeightVector incumbent = make_weights(WeightStrategy::uniform, k);
  double best = agreement_objective(pairs, incumbent, config.tie_epsilon);
  if (k == 1) return {incumbent, best};  // the simplex is a single point

  Rng rng(config.seed);
  const std::vector<double> symmetric(k, 1.0);

  auto consider = [&](std::vector<double> w) {
    WeightVector candidate(std::move(w));
    const double obj =
        agreement_objective(pairs, candidate, config.tie_epsilon);
    if (obj > best) {
      best = obj;
      incumbent = std::move(candidate);
    }
  };

  for (int i = 0; i < config.n_random; ++i) {
    consider(rng.dirichlet(symmetric));
  }

  for (int round = 0; round < config.n_rounds; ++round) {
    // Proposals all draw around the round's starting incumbent; the best
    // strictly-improving one (lowest index on ties) becomes the next.
    std::vector<double> alpha(k);
    for (std::size_t j = 0; j < k; ++j) {
      alpha[j] = config.concentration * incumbent.weights()[j];
    }
    std::vector<std::vector<double>> proposals;
    proposals.reserve(config.proposals_per_round);
    for (int p = 0; p < config.proposals_per_round; ++p) {
      proposals.push_back(rng.dirichlet(alpha));
    }
    for (auto& proposal : proposals) consider(std::move(proposal));
    logging::info("weightopt_round",
                  {{"round", logging::field_str(round)},
                   {"agreement", logging::field_str(best)}});
  }
  return {std::move(incumbent), best};
}

std::map<std::string, ScopedWeights> optimize_scoped(
    std::span<const ScoredPair> pairs, std::size_t k, WeightScope scope,
    const WeightOptConfig& config) {
  config.validate();
  if (pairs.empty()) throw Error("cannot optimize weights on 0 pairs");

  std::map<std::string, ScopedWeights> out;
  if (scope == WeightScope::global) {
    auto opt = optimize_weights(pairs, k, config);
    out.emplace("global",
                ScopedWeights{WeightVector(opt.weights.weights(),
                                           WeightScope::global, "global"),
                              opt.agreement, pairs.size(), false});
    return out;
  }

  std::map<std::string, std::vector<ScoredPair>> groups;
  for (const auto& pair : pairs) {
    if (scope == WeightScope::section) {
      if (!pair.section) {
        throw Error(
            "section-scoped optimization needs a section on every pair");
      }
      groups[*pair.section].push_back(pair);
    } else {
      groups[pair.dataset].push_back(pair);
    }
  }

  std::optional<OptimizedWeights> global;  // shared fallback, computed once
  for (const auto& [key, group] : groups) {
    if (group.size() < config.min_pairs_per_scope) {
      if (!global) global = optimize_weights(pairs, k, config);
      const double local =
          agreement_objective(group, global->weights, config.tie_epsilon);
      out.emplace(key, ScopedWeights{WeightVector(global->weights.weights(),
                                                  scope, key),
                                     local, group.size(), true});
      logging::info("weightopt_fallback",
                    {{"scope_key", key},
                     {"n_pairs", logging::field_str(group.size())}});
      continue;
    }
    auto opt = optimize_weights(group, k, config);
    out.emplace(key,
                ScopedWeights{WeightVector(opt.weights.weights(), scope, key),
                              opt.agreement, group.size(), false});
  }
  return out;
}

namespace {

ordered_json learned_to_json(const LearnedWeightsRecord& r) {
  ordered_json j;
  j["scope"] = r.scope;
  j["scope_key"] = r.scope_key;
  j["weights"] = r.weights;
  j["achieved_agreement"] = r.achieved_agreement;
  j["config_digest"] = r.config_digest;
  j["seed"] = r.seed;
  return j;
}

LearnedWeightsRecord learned_from_json(const ordered_json& j) {
  LearnedWeightsRecord r;
  r.scope = to_string(parse_weight_scope(require(j, "scope").get<std::string>()));
  r.scope_key = require(j, "scope_key").get<std::string>();
  r.weights = require(j, "weights").get<std::vector<double>>();
  WeightVector check(r.weights);  // reject non-simplex weights at load time
  r.achieved_agreement = require(j, "achieved_agreement").get<double>();
  if (!(r.achieved_agreement >= 0.0 && r.achieved_agreement <= 1.0)) {
    throw Error(fmt::format("achieved_agreement {} outside [0, 1]",
                            r.achieved_agreement));
  }
  r.config_digest = require(j, "config_digest").get<std::string>();
  r.seed = require(j, "seed").get<std::uint64_t>();
  return r;
}

}  // namespace

std::vector<LearnedWeightsRecord> load_learned_weights(
    const std::filesystem::path& path) {
  return detail::load_lines<LearnedWeightsRecord>(path, learned_from_json);
}

void save_learned_weights(std::span<const LearnedWeightsRecord> records,
                          const std::filesystem::path& path) {
  detail::save_lines(records, path, learned_to_json);
}

std::vector<LearnedWeightsRecord> to_records(
    const std::map<std::string, ScopedWeights>& scoped, WeightScope scope,
    const WeightOptConfig& config) {
  std::vector<LearnedWeightsRecord> out;
  out.reserve(scoped.size());
  for (const auto& [key, sw] : scoped) {
    LearnedWeightsRecord r;
    r.scope = to_string(scope);
    r.scope_key = key;
    r.weights = sw.weights.weights();
    r.achieved_agreement = sw.agreement;
    r.config_digest = config.digest();
    r.seed = config.seed;
    out.push_back(std::move(r));
  }
  return out;
}

const LearnedWeightsRecord& select_record(
    std::span<const LearnedWeightsRecord> records, WeightScope scope,
    const std::string& scope_key) {
  const std::string scope_name = to_string(scope);
  for (const auto& r : records) {
    if (r.scope == scope_name && r.scope_key == scope_key) return r;
  }
  for (const auto& r : records) {
    if (r.scope == "global") return r;
  }
  throw Error(fmt::format(
      "no learned weights for {} '{}' and no global fallback", scope_name,
      scope_key));
}

}  // namespace lmeval
