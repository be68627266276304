#include "cli_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "lmeval/error.hpp"
#include "lmeval/mock_backend.hpp"

namespace lmeval::cli {
namespace {

using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

void reject_unknown_keys(const ordered_json& j, std::string_view where,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw Error(fmt::format("config: unknown key '{}' under {}", key, where));
    }
  }
}

template <typename T>
void maybe(const ordered_json& j, const char* key, T& target) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    target = it->get<T>();
  }
}

}  // namespace

CliConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(fmt::format("cannot open config '{}'", path.string()));
  }
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("config '{}': {}", path.string(), e.what()));
  }

  CliConfig config;
  reject_unknown_keys(j, "the top level",
                      {"backend", "scoring", "parallelism", "seed",
                       "tie_epsilon", "tie_policy", "weightopt", "verbose"});

  if (auto it = j.find("backend"); it != j.end()) {
    reject_unknown_keys(*it, "'backend'",
                        {"kind", "fixtures", "student_fixtures", "url",
                         "model", "api_key_env", "timeout_seconds", "retry"});
    maybe(*it, "kind", config.backend);
    maybe(*it, "fixtures", config.fixtures);
    maybe(*it, "student_fixtures", config.student_fixtures);
    maybe(*it, "url", config.http.url);
    maybe(*it, "model", config.http.model);
    maybe(*it, "api_key_env", config.http.api_key_env);
    maybe(*it, "timeout_seconds", config.http.timeout_seconds);
    if (auto r = it->find("retry"); r != it->end()) {
      reject_unknown_keys(
          *r, "'backend.retry'",
          {"max_attempts", "base_delay_ms", "multiplier", "max_delay_ms"});
      maybe(*r, "max_attempts", config.retry.max_attempts);
      int base_ms = static_cast<int>(config.retry.base_delay.count());
      int max_ms = static_cast<int>(config.retry.max_delay.count());
      maybe(*r, "base_delay_ms", base_ms);
      maybe(*r, "max_delay_ms", max_ms);
      config.retry.base_delay = std::chrono::milliseconds(base_ms);
      config.retry.max_delay = std::chrono::milliseconds(max_ms);
      maybe(*r, "multiplier", config.retry.multiplier);
    }
  }

  if (auto it = j.find("scoring"); it != j.end()) {
    reject_unknown_keys(*it, "'scoring'",
                        {"support", "rationale_mode", "pass_threshold",
                         "template_id", "template_file"});
    maybe(*it, "support", config.scoring.support);
    if (auto m = it->find("rationale_mode"); m != it->end()) {
      config.scoring.rationale_mode =
          parse_rationale_mode(m->get<std::string>());
    }
    maybe(*it, "pass_threshold", config.scoring.pass_threshold);
    maybe(*it, "template_id", config.scoring.prompt_template_id);
    maybe(*it, "template_file", config.template_file);
  }

  maybe(j, "parallelism", config.parallelism);
  maybe(j, "seed", config.seed);
  maybe(j, "tie_epsilon", config.tie_epsilon);
  if (auto it = j.find("tie_policy"); it != j.end()) {
    config.tie_policy = parse_tie_policy(it->get<std::string>());
  }
  if (auto it = j.find("weightopt"); it != j.end()) {
    reject_unknown_keys(*it, "'weightopt'",
                        {"n_random", "n_rounds", "proposals_per_round",
                         "concentration", "min_pairs_per_scope"});
    maybe(*it, "n_random", config.opt.n_random);
    maybe(*it, "n_rounds", config.opt.n_rounds);
    maybe(*it, "proposals_per_round", config.opt.proposals_per_round);
    maybe(*it, "concentration", config.opt.concentration);
    maybe(*it, "min_pairs_per_scope", config.opt.min_pairs_per_scope);
  }
  maybe(j, "verbose", config.verbose);
  return config;
}

nlohmann::ordered_json resolved_json(const CliConfig& config) {
  ordered_json j;
  j["backend"]["kind"] = config.backend;
  j["backend"]["fixtures"] = config.fixtures;
  j["backend"]["student_fixtures"] = config.student_fixtures;
  j["backend"]["url"] = config.http.url;
  j["backend"]["model"] = config.http.model;
  j["backend"]["api_key_env"] = config.http.api_key_env;
  j["backend"]["timeout_seconds"] = config.http.timeout_seconds;
  j["backend"]["retry"]["max_attempts"] = config.retry.max_attempts;
  j["backend"]["retry"]["base_delay_ms"] = config.retry.base_delay.count();
  j["backend"]["retry"]["multiplier"] = config.retry.multiplier;
  j["backend"]["retry"]["max_delay_ms"] = config.retry.max_delay.count();
  j["scoring"]["support"] = config.scoring.support;
  j["scoring"]["rationale_mode"] =
      config.scoring.rationale_mode == RationaleMode::generate ? "generate"
                                                               : "none";
  j["scoring"]["pass_threshold"] = config.scoring.pass_threshold;
  j["scoring"]["template_id"] = config.scoring.prompt_template_id;
  j["scoring"]["template_file"] = config.template_file;
  j["parallelism"] = config.parallelism;
  j["seed"] = config.seed;
  j["tie_epsilon"] = config.tie_epsilon;
  j["tie_policy"] = to_string(config.tie_policy);
  j["weightopt"]["n_random"] = config.opt.n_random;
  j["weightopt"]["n_rounds"] = config.opt.n_rounds;
  j["weightopt"]["proposals_per_round"] = config.opt.proposals_per_round;
  j["weightopt"]["concentration"] = config.opt.concentration;
  j["weightopt"]["min_pairs_per_scope"] = config.opt.min_pairs_per_scope;
  return j;
}

std::string config_digest(const CliConfig& config, std::string_view extra) {
  const std::string payload =
      resolved_json(config).dump() + "|" + std::string(extra);
  return fmt::format("{:016x}", fnv1a64(payload));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string file_digest(const std::filesystem::path& path) {
  return fmt::format("{:016x}", fnv1a64(read_text_file(path)));
}

TemplateRegistry make_registry(const CliConfig& config) {
  TemplateRegistry registry;
  if (!config.template_file.empty()) {
    registry.load_file(config.template_file);
  }
  return registry;
}

BackendHandle::BackendHandle(const CliConfig& config,
                             const std::string& fixtures) {
  if (config.backend == "mock") {
    if (fixtures.empty()) {
      throw Error("mock backend needs a fixtures file (--fixtures)");
    }
    inner_ = std::make_unique<MockBackend>(MockBackend::load(fixtures));
  } else if (config.backend == "http") {
    if (config.http.url.empty() || config.http.model.empty()) {
      throw Error("http backend needs url and model in the config");
    }
    inner_ = std::make_unique<HttpBackend>(config.http);
  } else {
    throw Error(fmt::format("unknown backend kind '{}' (allowed: mock, http)",
                            config.backend));
  }
  retrying_ = std::make_unique<RetryingBackend>(*inner_, config.retry);
}

WeightsSource parse_weights_source(const std::string& spec) {
  WeightsSource source;
  source.spec = spec;
  if (spec == "uniform") {
    source.strategy = WeightStrategy::uniform;
  } else if (spec == "decaying") {
    source.strategy = WeightStrategy::decaying;
  } else if (spec.starts_with("learned:")) {
    source.strategy = WeightStrategy::learned;
    source.file = spec.substr(8);
    if (source.file.empty()) {
      throw Error("weights source 'learned:' needs a file path");
    }
    source.learned = load_learned_weights(source.file);
    if (source.learned.empty()) {
      throw Error(fmt::format("weights file '{}' holds no records",
                              source.file));
    }
  } else if (spec.starts_with("single:")) {
    source.strategy = WeightStrategy::single;
    const std::string raw = spec.substr(7);
    try {
      std::size_t used = 0;
      source.index = std::stoul(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      throw Error(fmt::format("weights source 'single:{}' needs an integer "
                              "test index",
                              raw));
    }
  } else {
    throw Error(fmt::format(
        "unknown weights source '{}' (allowed: uniform, decaying, "
        "learned:<file>, single:<index>)",
        spec));
  }
  return source;
}

WeightVector weights_for(const WeightsSource& source, std::size_t k,
                         double decay_base, WeightScope scope,
                         const std::string& scope_key) {
  switch (source.strategy) {
    case WeightStrategy::uniform:
      return make_weights(WeightStrategy::uniform, k);
    case WeightStrategy::decaying:
      return make_weights(WeightStrategy::decaying, k, decay_base);
    case WeightStrategy::single:
      return make_weights(WeightStrategy::single, k, decay_base, {},
                          source.index);
    case WeightStrategy::learned: {
      const auto& record = select_record(source.learned, scope, scope_key);
      return make_weights(WeightStrategy::learned, k, decay_base,
                          WeightVector(record.weights));
    }
  }
  throw Error("weights_for: unreachable");
}

}  // namespace lmeval::cli
