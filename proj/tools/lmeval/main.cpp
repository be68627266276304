#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cli_config.hpp"
#include "lmeval/aggregation.hpp"
#include "lmeval/datagen.hpp"
#include "lmeval/error.hpp"
#include "lmeval/logging.hpp"
#include "lmeval/metrics.hpp"
#include "lmeval/records.hpp"
#include "lmeval/reporting.hpp"
#include "lmeval/scoring.hpp"
#include "lmeval/weightopt.hpp"

namespace lmeval::cli {
namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

// ---------------------------------------------------------------- common

/// Flags shared by every command; values only land in the config when the
/// user actually passed them (precedence: flags > config file > defaults).
struct CommonOpts {
  std::string config_path;
  std::string backend;
  std::string fixtures;
  std::string student_fixtures;
  std::string support_csv;
  std::string rationale_mode;
  std::string tie_policy;
  std::string template_id;
  std::string template_file;
  double pass_threshold = 0.0;
  int parallelism = 0;
  std::uint64_t seed = 0;
  double tie_epsilon = 0.0;
  bool verbose = false;

  CLI::Option* o_backend = nullptr;
  CLI::Option* o_fixtures = nullptr;
  CLI::Option* o_student_fixtures = nullptr;
  CLI::Option* o_support = nullptr;
  CLI::Option* o_rationale_mode = nullptr;
  CLI::Option* o_tie_policy = nullptr;
  CLI::Option* o_template_id = nullptr;
  CLI::Option* o_template_file = nullptr;
  CLI::Option* o_pass_threshold = nullptr;
  CLI::Option* o_parallelism = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_tie_epsilon = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    o_backend = cmd->add_option("--backend", backend, "mock | http");
    o_fixtures = cmd->add_option("--fixtures", fixtures,
                                 "mock backend fixture file");
    o_student_fixtures = cmd->add_option(
        "--student-fixtures", student_fixtures,
        "separate mock fixtures for the student model (datagen)");
    o_support = cmd->add_option("--support", support_csv,
                                "score support, e.g. 1,2,3,4,5");
    o_rationale_mode = cmd->add_option("--rationale-mode", rationale_mode,
                                       "none | generate");
    o_tie_policy = cmd->add_option("--tie-policy", tie_policy,
                                   "wrong | half_credit");
    o_template_id = cmd->add_option("--template-id", template_id,
                                    "prompt template id");
    o_template_file = cmd->add_option("--template-file", template_file,
                                      "extra prompt template JSON");
    o_pass_threshold = cmd->add_option("--pass-threshold", pass_threshold,
                                       "inclusive pass threshold");
    o_parallelism = cmd->add_option("--parallelism", parallelism,
                                    "max concurrent backend calls");
    o_seed = cmd->add_option("--seed", seed, "seed for randomized steps");
    o_tie_epsilon = cmd->add_option("--tie-epsilon", tie_epsilon,
                                    "margin treated as a tie");
    cmd->add_flag("--verbose", verbose, "structured logs on stderr");
  }

  CliConfig resolve() const {
    CliConfig config;
    if (!config_path.empty()) config = load_config_file(config_path);
    if (o_backend->count()) config.backend = backend;
    if (o_fixtures->count()) config.fixtures = fixtures;
    if (o_student_fixtures->count()) {
      config.student_fixtures = student_fixtures;
    }
    if (o_support->count()) config.scoring.support = parse_support(support_csv);
    if (o_rationale_mode->count()) {
      config.scoring.rationale_mode = parse_rationale_mode(rationale_mode);
    }
    if (o_tie_policy->count()) config.tie_policy = parse_tie_policy(tie_policy);
    if (o_template_id->count()) config.scoring.prompt_template_id = template_id;
    if (o_template_file->count()) config.template_file = template_file;
    if (o_pass_threshold->count()) {
      config.scoring.pass_threshold = pass_threshold;
    }
    if (o_parallelism->count()) config.parallelism = parallelism;
    if (o_seed->count()) config.seed = seed;
    if (o_tie_epsilon->count()) config.tie_epsilon = tie_epsilon;
    config.verbose = config.verbose || verbose;

    config.opt.seed = config.seed;
    config.opt.tie_epsilon = config.tie_epsilon;
    if (config.parallelism < 1) throw Error("parallelism must be >= 1");
    config.scoring.validate();
    logging::set_enabled(config.verbose);
    return config;
  }

  static std::vector<int> parse_support(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
      const std::size_t comma = csv.find(',', pos);
      const std::string token =
          csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(fmt::format("bad support entry '{}'", token));
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }
};

std::string read_input(const std::string& inline_text,
                       const std::string& file_path, const char* what) {
  if (!inline_text.empty() && !file_path.empty()) {
    throw Error(fmt::format("give {} inline or as a file, not both", what));
  }
  if (!file_path.empty()) return read_text_file(file_path);
  if (!inline_text.empty()) return inline_text;
  throw Error(fmt::format("missing {}", what));
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

// Exact learned-record lookup by (scope name, key); nullptr when absent.
const LearnedWeightsRecord* find_record(
    std::span<const LearnedWeightsRecord> records, std::string_view scope,
    std::string_view key) {
  for (const auto& r : records) {
    if (r.scope == scope && r.scope_key == key) return &r;
  }
  return nullptr;
}

/// Weights for one record's scope context: most specific learned match
/// first (section, then dataset, then global); non-learned sources ignore
/// the context.
WeightVector weights_for_pair(const WeightsSource& source, std::size_t k,
                              double decay_base,
                              const std::optional<std::string>& section,
                              const std::string& dataset) {
  if (source.strategy != WeightStrategy::learned) {
    return weights_for(source, k, decay_base);
  }
  const LearnedWeightsRecord* record = nullptr;
  if (section) record = find_record(source.learned, "section", *section);
  if (!record) record = find_record(source.learned, "dataset", dataset);
  if (!record) record = find_record(source.learned, "global", "global");
  if (!record) {
    throw Error(fmt::format(
        "no learned weights match section '{}' / dataset '{}' and no global "
        "fallback",
        section.value_or(""), dataset));
  }
  return make_weights(WeightStrategy::learned, k, decay_base,
                      WeightVector(record->weights));
}

// ----------------------------------------------------------------- score

struct ScoreArgs {
  CommonOpts common;
  std::string suite_path;
  std::string prompt, prompt_file;
  std::string response, response_file;
  std::string weights_spec;
  std::string out_path;
};

int cmd_score(const ScoreArgs& args) {
  const CliConfig config = args.common.resolve();
  const TestSuite suite = load_suite(args.suite_path);
  const Exchange exchange{
      read_input(args.prompt, args.prompt_file, "--prompt"),
      read_input(args.response, args.response_file, "--response")};
  const TemplateRegistry registry = make_registry(config);
  BackendHandle handle(config, config.fixtures);

  const SuiteScoringOutcome outcome =
      score_suite(suite, exchange, handle.backend(), config.scoring,
                  config.parallelism, registry);

  std::string spec = args.weights_spec;
  if (spec.empty()) {
    switch (suite.default_weighting) {
      case Weighting::uniform: spec = "uniform"; break;
      case Weighting::decaying: spec = "decaying"; break;
      case Weighting::learned:
        throw Error(
            "suite defaults to learned weights; pass --weights "
            "learned:<file>");
    }
  }
  const WeightsSource source = parse_weights_source(spec);
  const WeightVector full =
      weights_for(source, suite.tests.size(), suite.decay_base);

  std::vector<bool> present;
  present.reserve(suite.tests.size());
  std::size_t cursor = 0;
  for (const auto& test : suite.tests) {
    const bool scored = cursor < outcome.results.size() &&
                        outcome.results[cursor].test_id() == test.id;
    present.push_back(scored);
    if (scored) ++cursor;
  }
  const WeightVector weights = restrict_weights(full, present);
  const double agg = aggregate(outcome.results, weights);

  fmt::print("command=score suite={} tests={} scored={} failed={}\n", suite.id,
             suite.tests.size(), outcome.results.size(),
             outcome.failures.size());
  for (const auto& result : outcome.results) {
    fmt::print("test {} expected={:.6f} passed={}\n", result.test_id(),
               result.expected_score(), bool_str(result.passed()));
  }
  for (const auto& failure : outcome.failures) {
    fmt::print("failed {} error={}\n", failure.test_id, failure.message);
  }
  fmt::print("aggregate weights={} value={:.6f}\n", spec, agg);
  if (!args.out_path.empty()) {
    save_results(outcome.results, args.out_path);
    fmt::print("written={} records={}\n", args.out_path,
               outcome.results.size());
  }
  fmt::print("config_digest={}\n",
             config_digest(config,
                           read_text_file(args.suite_path) + "|" + spec));
  return outcome.failures.empty() ? kOk : kPartial;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  CommonOpts common;
  std::string mode;
  std::string records_path;
  std::string suite_path;
  std::string weights_spec = "uniform";
  std::string dump_scored_path;
};

/// Scores one exchange; nullopt when any test failed (the record is then
/// excluded from the metric and counted).
std::optional<std::vector<double>> try_score(const TestSuite& suite,
                                             const Exchange& exchange,
                                             Backend& backend,
                                             const CliConfig& config,
                                             const TemplateRegistry& registry) {
  try {
    const SuiteScoringOutcome outcome = score_suite(
        suite, exchange, backend, config.scoring, config.parallelism, registry);
    if (!outcome.failures.empty()) return std::nullopt;
    std::vector<double> scores;
    scores.reserve(outcome.results.size());
    for (const auto& r : outcome.results) scores.push_back(r.expected_score());
    return scores;
  } catch (const Error&) {
    return std::nullopt;
  }
}

int eval_pairwise(const EvalArgs& args, const CliConfig& config,
                  const TestSuite& suite, const TemplateRegistry& registry,
                  Backend& backend, const WeightsSource& source) {
  const std::vector<PreferencePair> pairs = load_pairs(args.records_path);
  const std::size_t k = suite.tests.size();

  std::vector<ScoredPair> scored;
  std::vector<PrefLabel> verdicts, labels;
  std::map<std::string, std::pair<std::size_t, std::size_t>> sections;
  bool any_section = false;
  std::size_t excluded = 0;
  for (const auto& pair : pairs) {
    const auto a =
        try_score(suite, {pair.prompt, pair.response_a}, backend, config,
                  registry);
    const auto b =
        try_score(suite, {pair.prompt, pair.response_b}, backend, config,
                  registry);
    if (!a || !b) {
      ++excluded;
      continue;
    }
    const WeightVector weights = weights_for_pair(
        source, k, suite.decay_base, pair.section, pair.dataset);
    const PrefLabel verdict =
        pairwise_verdict(aggregate(*a, weights), aggregate(*b, weights),
                         config.tie_epsilon);
    verdicts.push_back(verdict);
    labels.push_back(pair.label);
    if (pair.section) any_section = true;
    auto& tally = sections[pair.section.value_or("(none)")];
    ++tally.second;
    if (verdict == pair.label) ++tally.first;
    scored.push_back({*a, *b, pair.label, pair.dataset, pair.section});
  }
  if (verdicts.empty()) {
    throw Error("every pair was excluded; nothing to evaluate");
  }
  const double accuracy =
      pairwise_accuracy(verdicts, labels, config.tie_policy);

  fmt::print("command=eval mode=pairwise records={} n={} included={} "
             "excluded={}\n",
             args.records_path, pairs.size(), verdicts.size(), excluded);
  fmt::print("weights={} tie_policy={} tie_epsilon={:g}\n", source.spec,
             to_string(config.tie_policy), config.tie_epsilon);
  fmt::print("accuracy={:.6f}\n", accuracy);
  if (any_section) {
    for (const auto& [name, tally] : sections) {
      fmt::print("section {} n={} accuracy={:.6f}\n", name, tally.second,
                 static_cast<double>(tally.first) /
                     static_cast<double>(tally.second));
    }
  }
  if (!args.dump_scored_path.empty()) {
    save_scored_pairs(scored, args.dump_scored_path);
    fmt::print("written={} records={}\n", args.dump_scored_path,
               scored.size());
  }
  fmt::print("records_digest={}\n", file_digest(args.records_path));
  fmt::print("config_digest={}\n",
             config_digest(config, read_text_file(args.suite_path) + "|" +
                                       source.spec + "|" +
                                       file_digest(args.records_path)));
  return excluded == 0 ? kOk : kPartial;
}

int eval_direct(const EvalArgs& args, const CliConfig& config,
                const TestSuite& suite, const TemplateRegistry& registry,
                Backend& backend, const WeightsSource& source, bool classify) {
  const std::vector<DirectRating> ratings = load_ratings(args.records_path);
  const std::size_t k = suite.tests.size();

  std::vector<double> predicted, gold;
  std::size_t excluded = 0;
  for (const auto& rating : ratings) {
    const auto scores = try_score(suite, {rating.prompt, rating.response},
                                  backend, config, registry);
    if (!scores) {
      ++excluded;
      continue;
    }
    const WeightVector weights =
        weights_for_pair(source, k, suite.decay_base, std::nullopt, "");
    predicted.push_back(aggregate(*scores, weights));
    gold.push_back(rating.gold_score);
  }
  if (predicted.empty()) {
    throw Error("every rating was excluded; nothing to evaluate");
  }

  fmt::print("command=eval mode={} records={} n={} included={} excluded={}\n",
             classify ? "classify" : "direct", args.records_path,
             ratings.size(), predicted.size(), excluded);
  fmt::print("weights={} pass_threshold={:g}\n", source.spec,
             config.scoring.pass_threshold);
  if (classify) {
    const std::size_t n = predicted.size();
    const auto pred_pass = std::make_unique<bool[]>(n);
    const auto gold_pass = std::make_unique<bool[]>(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred_pass[i] = predicted[i] >= config.scoring.pass_threshold;
      gold_pass[i] = gold[i] >= config.scoring.pass_threshold;
    }
    fmt::print("accuracy={:.6f}\n",
               binary_accuracy({pred_pass.get(), n}, {gold_pass.get(), n}));
  } else {
    fmt::print("pearson={:.6f}\n", pearson(predicted, gold));
  }
  fmt::print("records_digest={}\n", file_digest(args.records_path));
  fmt::print("config_digest={}\n",
             config_digest(config, read_text_file(args.suite_path) + "|" +
                                       source.spec + "|" +
                                       file_digest(args.records_path)));
  return excluded == 0 ? kOk : kPartial;
}

int cmd_eval(const EvalArgs& args) {
  if (args.mode != "pairwise" && args.mode != "direct" &&
      args.mode != "classify") {
    throw Error(fmt::format(
        "unknown eval mode '{}' (allowed: pairwise, direct, classify)",
        args.mode));
  }
  const CliConfig config = args.common.resolve();
  const TestSuite suite = load_suite(args.suite_path);
  const TemplateRegistry registry = make_registry(config);
  BackendHandle handle(config, config.fixtures);
  const WeightsSource source = parse_weights_source(args.weights_spec);

  if (args.mode == "pairwise") {
    return eval_pairwise(args, config, suite, registry, handle.backend(),
                         source);
  }
  if (args.mode == "direct") {
    return eval_direct(args, config, suite, registry, handle.backend(), source,
                       /*classify=*/false);
  }
  return eval_direct(args, config, suite, registry, handle.backend(), source,
                     /*classify=*/true);
}

// ------------------------------------------------------- optimize-weights

struct OptimizeArgs {
  CommonOpts common;
  std::string pairs_path;
  std::string scope = "global";
  double split = 0.5;
  std::string out_path;
  int k = 0;
};

int cmd_optimize_weights(const OptimizeArgs& args) {
  const CliConfig config = args.common.resolve();
  const std::vector<ScoredPair> pairs = load_scored_pairs(args.pairs_path);
  if (pairs.empty()) throw Error("pairs file holds no records");
  const std::size_t k =
      args.k > 0 ? static_cast<std::size_t>(args.k)
                 : pairs.front().scores_a.size();
  const WeightScope scope = parse_weight_scope(args.scope);

  auto [train, heldout] = split_pairs(pairs, args.split, config.seed);
  if (train.empty() || heldout.empty()) {
    throw Error(fmt::format("split {} left train={} heldout={}", args.split,
                            train.size(), heldout.size()));
  }

  const auto scoped = optimize_scoped(train, k, scope, config.opt);
  const auto records = to_records(scoped, scope, config.opt);
  save_learned_weights(records, args.out_path);

  const WeightVector uniform = make_weights(WeightStrategy::uniform, k);
  const double uniform_train =
      agreement_objective(train, uniform, config.tie_epsilon);
  const double uniform_heldout =
      agreement_objective(heldout, uniform, config.tie_epsilon);

  auto key_of = [&](const ScoredPair& pair) -> std::string {
    switch (scope) {
      case WeightScope::global: return "global";
      case WeightScope::dataset: return pair.dataset;
      case WeightScope::section:
        return pair.section.value_or("");
    }
    return "global";
  };
  std::map<std::string, std::vector<ScoredPair>> heldout_groups;
  for (const auto& pair : heldout) heldout_groups[key_of(pair)].push_back(pair);

  fmt::print("command=optimize-weights pairs={} n={} k={} scope={} split={:g} "
             "seed={}\n",
             args.pairs_path, pairs.size(), k, args.scope, args.split,
             config.seed);
  fmt::print("train_n={} heldout_n={}\n", train.size(), heldout.size());
  fmt::print("uniform train_agreement={:.6f} heldout_agreement={:.6f}\n",
             uniform_train, uniform_heldout);

  std::map<std::string, double> uniform_by_key, learned_by_key;
  for (const auto& [key, sw] : scoped) {
    const auto group = heldout_groups.find(key);
    std::string heldout_part = "heldout_n=0 heldout_agreement=none";
    if (group != heldout_groups.end() && !group->second.empty()) {
      const double learned_h =
          agreement_objective(group->second, sw.weights, config.tie_epsilon);
      heldout_part = fmt::format("heldout_n={} heldout_agreement={:.6f}",
                                 group->second.size(), learned_h);
      uniform_by_key[key] =
          agreement_objective(group->second, uniform, config.tie_epsilon);
      learned_by_key[key] = learned_h;
    }
    std::vector<std::string> formatted;
    formatted.reserve(sw.weights.size());
    for (double w : sw.weights.weights()) {
      formatted.push_back(fmt::format("{:.6f}", w));
    }
    fmt::print("key {} train_n={} train_agreement={:.6f} {} fell_back={} "
               "weights={}\n",
               key, sw.n_pairs, sw.agreement, heldout_part,
               bool_str(sw.fell_back_to_global), fmt::join(formatted, ","));
  }

  if (!learned_by_key.empty()) {
    const std::string digest = file_digest(args.pairs_path);
    std::vector<std::pair<std::string, StrategyMetrics>> table_input;
    table_input.emplace_back("uniform",
                             StrategyMetrics{uniform_by_key, digest});
    table_input.emplace_back(fmt::format("learned-{}", args.scope),
                             StrategyMetrics{learned_by_key, digest});
    fmt::print("held-out agreement by {}:\n{}", args.scope,
               format_strategy_table(strategy_table(table_input)));
  }

  fmt::print("written={} records={}\n", args.out_path, records.size());
  fmt::print("config_digest={}\n",
             config_digest(config, file_digest(args.pairs_path) + "|" +
                                       args.scope));
  return kOk;
}

// ------------------------------------------------------------- agreement

struct AgreementArgs {
  CommonOpts common;
  std::string annotations_path;
};

int cmd_agreement(const AgreementArgs& args) {
  const CliConfig config = args.common.resolve();
  const auto records = load_annotations(args.annotations_path);
  const AnnotationPivot pivot = pivot_annotations(records);
  const double kappa = fleiss_kappa(pivot.counts, pivot.raters_per_item);

  fmt::print("command=agreement annotations={}\n", args.annotations_path);
  fmt::print("items={} raters_per_item={} categories={} dropped={}\n",
             pivot.item_ids.size(), pivot.raters_per_item,
             pivot.categories.size(), pivot.dropped_item_ids.size());
  for (const auto& id : pivot.dropped_item_ids) {
    fmt::print("dropped_item {}\n", id);
  }
  fmt::print("kappa={:.6f}\n", kappa);
  fmt::print("config_digest={}\n",
             config_digest(config, file_digest(args.annotations_path)));
  return kOk;
}

// --------------------------------------------------------------- datagen

struct DatagenTestsArgs {
  CommonOpts common;
  std::string prompt, prompt_file;
  std::vector<std::string> responses;
  int n = 8;
  std::string suite_id = "generated-v1";
  std::string out_path;
};

int cmd_datagen_tests(const DatagenTestsArgs& args) {
  const CliConfig config = args.common.resolve();
  BackendHandle teacher(config, config.fixtures);
  const std::string prompt =
      read_input(args.prompt, args.prompt_file, "--prompt");

  const GeneratedTests gen =
      generate_unit_tests(prompt, args.responses, args.n, teacher.backend());

  TestSuite suite;
  suite.id = args.suite_id;
  suite.tests = gen.tests;
  const std::vector<TestSuite> suites{suite};
  save_suites(suites, args.out_path);

  fmt::print("command=datagen stage=tests requested={} parsed={} kept={} "
             "dropped={} shortfall={}\n",
             gen.n_requested, gen.n_parsed, gen.tests.size(), gen.n_dropped,
             bool_str(gen.shortfall));
  fmt::print("written={} records=1\n", args.out_path);
  fmt::print("config_digest={}\n", config_digest(config, prompt));
  return gen.shortfall ? kPartial : kOk;
}

struct DatagenContrastArgs {
  CommonOpts common;
  std::string prompt, prompt_file;
  std::string suite_path;
  std::string test_id;
  std::vector<int> targets;
  std::string dataset = "contrastive";
  std::string out_path;
};

int cmd_datagen_contrast(const DatagenContrastArgs& args) {
  const CliConfig config = args.common.resolve();
  BackendHandle teacher(config, config.fixtures);
  const std::string prompt =
      read_input(args.prompt, args.prompt_file, "--prompt");
  const TestSuite suite = load_suite(args.suite_path);

  const UnitTest* test = nullptr;
  if (args.test_id.empty()) {
    test = &suite.tests.front();
  } else {
    for (const auto& t : suite.tests) {
      if (t.id == args.test_id) test = &t;
    }
    if (!test) {
      throw Error(fmt::format("suite '{}' has no test '{}'", suite.id,
                              args.test_id));
    }
  }

  const auto responses = generate_contrastive(
      prompt, *test, args.targets, config.scoring.support, teacher.backend());
  const auto pairs = contrastive_to_pairs(prompt, responses, args.dataset);
  save_pairs(pairs, args.out_path);

  fmt::print("command=datagen stage=contrast test={} targets={} responses={} "
             "pairs={}\n",
             test->id, fmt::join(args.targets, ","), responses.size(),
             pairs.size());
  fmt::print("written={} records={}\n", args.out_path, pairs.size());
  fmt::print("config_digest={}\n",
             config_digest(config, prompt + "|" + test->id));
  return kOk;
}

struct DatagenRationalesArgs {
  CommonOpts common;
  std::string items_path;
  std::string out_path;
  int max_attempts = 3;
};

int cmd_datagen_rationales(const DatagenRationalesArgs& args) {
  const CliConfig config = args.common.resolve();
  BackendHandle teacher(config, config.fixtures);
  const auto items = load_collection_items(args.items_path);
  if (items.empty()) throw Error("items file holds no records");

  std::vector<RationaleRecord> accepted;
  std::size_t rejected = 0, failed = 0;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    try {
      const RationaleOutcome outcome = generate_rationale_scored(
          item.test, {item.prompt, item.response}, item.gold_score,
          teacher.backend(), args.max_attempts, config.scoring.support);
      if (outcome.accepted) {
        accepted.push_back({item.test.id, item.prompt, item.response,
                            outcome.accepted->rationale,
                            outcome.accepted->score});
      } else {
        ++rejected;
        notes.push_back(fmt::format(
            "item {} rejected: no attempt matched seed {} in {} tries", i,
            *item.gold_score, outcome.attempts));
      }
    } catch (const Error& e) {
      ++failed;
      notes.push_back(fmt::format("item {} error: {}", i, e.what()));
    }
  }
  save_rationale_records(accepted, args.out_path);

  fmt::print("command=datagen stage=rationales items={} accepted={} "
             "rejected={} failed={}\n",
             items.size(), accepted.size(), rejected, failed);
  for (const auto& note : notes) fmt::print("note {}\n", note);
  fmt::print("written={} records={}\n", args.out_path, accepted.size());
  fmt::print("config_digest={}\n",
             config_digest(config, file_digest(args.items_path)));
  if (accepted.empty()) return kFatal;
  return (rejected + failed) == 0 ? kOk : kPartial;
}

struct DatagenPairsArgs {
  CommonOpts common;
  std::string items_path;
  std::string strategy = "teacher";
  std::string out_path;
  int samples = 4;
  std::size_t max_pairs = 4;
  int revision_rounds = 1;
};

int cmd_datagen_pairs(const DatagenPairsArgs& args) {
  const CliConfig config = args.common.resolve();
  BackendHandle teacher(config, config.fixtures);
  std::optional<BackendHandle> student_handle;
  if (!config.student_fixtures.empty()) {
    student_handle.emplace(config, config.student_fixtures);
  }
  Backend& student =
      student_handle ? student_handle->backend() : teacher.backend();

  const auto items = load_collection_items(args.items_path);
  const PairStrategy strategy = parse_pair_strategy(args.strategy);
  CollectConfig collect;
  collect.samples_per_item = args.samples;
  collect.max_pairs_per_item = args.max_pairs;
  collect.revision_rounds = args.revision_rounds;
  collect.support = config.scoring.support;
  collect.parallelism = config.parallelism;

  const CollectResult result = collect_rationale_pairs(
      strategy, items, student, teacher.backend(), collect);
  save_rationale_pairs(result.pairs, args.out_path);

  fmt::print("command=datagen stage=dpo-pairs strategy={} items={} pairs={} "
             "skipped={} dropped={}\n",
             args.strategy, result.n_items, result.pairs.size(),
             result.n_skipped, result.n_dropped);
  for (const auto& diag : result.diagnostics) fmt::print("note {}\n", diag);
  fmt::print("written={} records={}\n", args.out_path, result.pairs.size());
  fmt::print("config_digest={}\n",
             config_digest(config, file_digest(args.items_path) + "|" +
                                       args.strategy));
  if (result.pairs.empty()) return kFatal;
  return (result.n_skipped + result.n_dropped) == 0 ? kOk : kPartial;
}

}  // namespace
}  // namespace lmeval::cli

int main(int argc, char** argv) {
  using namespace lmeval::cli;

  CLI::App app{
      "Scores language-model responses against natural-language unit tests "
      "and aggregates, optimizes, and reports the outcomes."};
  app.require_subcommand(1);

  std::function<int()> run;

  auto score_args = std::make_shared<ScoreArgs>();
  {
    CLI::App* cmd = app.add_subcommand("score", "score one exchange");
    score_args->common.attach(cmd);
    cmd->add_option("--suite", score_args->suite_path, "suite record file")
        ->required();
    cmd->add_option("--prompt", score_args->prompt, "prompt text");
    cmd->add_option("--prompt-file", score_args->prompt_file, "prompt file");
    cmd->add_option("--response", score_args->response, "response text");
    cmd->add_option("--response-file", score_args->response_file,
                    "response file");
    cmd->add_option("--weights", score_args->weights_spec,
                    "uniform | decaying | learned:<file> | single:<index>");
    cmd->add_option("--out", score_args->out_path, "result record file");
    cmd->callback([&run, score_args] {
      run = [score_args] { return cmd_score(*score_args); };
    });
  }

  auto eval_args = std::make_shared<EvalArgs>();
  {
    CLI::App* cmd = app.add_subcommand("eval", "evaluate a record file");
    eval_args->common.attach(cmd);
    cmd->add_option("--mode", eval_args->mode,
                    "pairwise | direct | classify")
        ->required();
    cmd->add_option("--records", eval_args->records_path, "record file")
        ->required();
    cmd->add_option("--suite", eval_args->suite_path, "suite record file")
        ->required();
    cmd->add_option("--weights", eval_args->weights_spec,
                    "uniform | decaying | learned:<file> | single:<index>");
    cmd->add_option("--dump-scored", eval_args->dump_scored_path,
                    "write per-test score vectors for weight learning");
    cmd->callback([&run, eval_args] {
      run = [eval_args] { return cmd_eval(*eval_args); };
    });
  }

  auto opt_args = std::make_shared<OptimizeArgs>();
  {
    CLI::App* cmd =
        app.add_subcommand("optimize-weights", "learn aggregation weights");
    opt_args->common.attach(cmd);
    cmd->add_option("--pairs", opt_args->pairs_path,
                    "scored pairs (from eval --dump-scored)")
        ->required();
    cmd->add_option("--scope", opt_args->scope,
                    "global | dataset | section");
    cmd->add_option("--split", opt_args->split, "train fraction");
    cmd->add_option("--k", opt_args->k, "number of tests (default inferred)");
    cmd->add_option("--out", opt_args->out_path, "weights record file")
        ->required();
    cmd->callback([&run, opt_args] {
      run = [opt_args] { return cmd_optimize_weights(*opt_args); };
    });
  }

  auto agree_args = std::make_shared<AgreementArgs>();
  {
    CLI::App* cmd =
        app.add_subcommand("agreement", "inter-rater agreement (kappa)");
    agree_args->common.attach(cmd);
    cmd->add_option("--annotations", agree_args->annotations_path,
                    "annotation record file")
        ->required();
    cmd->callback([&run, agree_args] {
      run = [agree_args] { return cmd_agreement(*agree_args); };
    });
  }

  {
    CLI::App* datagen =
        app.add_subcommand("datagen", "synthetic data pipelines");
    datagen->require_subcommand(1);

    auto tests_args = std::make_shared<DatagenTestsArgs>();
    {
      CLI::App* cmd =
          datagen->add_subcommand("tests", "generate unit tests");
      tests_args->common.attach(cmd);
      cmd->add_option("--prompt", tests_args->prompt, "prompt text");
      cmd->add_option("--prompt-file", tests_args->prompt_file, "prompt file");
      cmd->add_option("--response", tests_args->responses,
                      "steering response (repeat up to twice)");
      cmd->add_option("--n", tests_args->n, "tests to request");
      cmd->add_option("--suite-id", tests_args->suite_id, "output suite id");
      cmd->add_option("--out", tests_args->out_path, "suite record file")
          ->required();
      cmd->callback([&run, tests_args] {
        run = [tests_args] { return cmd_datagen_tests(*tests_args); };
      });
    }

    auto contrast_args = std::make_shared<DatagenContrastArgs>();
    {
      CLI::App* cmd = datagen->add_subcommand(
          "contrast", "generate contrastive responses");
      contrast_args->common.attach(cmd);
      cmd->add_option("--prompt", contrast_args->prompt, "prompt text");
      cmd->add_option("--prompt-file", contrast_args->prompt_file,
                      "prompt file");
      cmd->add_option("--suite", contrast_args->suite_path,
                      "suite holding the target test")
          ->required();
      cmd->add_option("--test-id", contrast_args->test_id,
                      "test id (default: first test)");
      cmd->add_option("--targets", contrast_args->targets,
                      "target scores (repeat or comma-separate)")
          ->required()
          ->delimiter(',');
      cmd->add_option("--dataset", contrast_args->dataset,
                      "dataset tag for emitted pairs");
      cmd->add_option("--out", contrast_args->out_path,
                      "preference pair record file")
          ->required();
      cmd->callback([&run, contrast_args] {
        run = [contrast_args] { return cmd_datagen_contrast(*contrast_args); };
      });
    }

    auto rat_args = std::make_shared<DatagenRationalesArgs>();
    {
      CLI::App* cmd = datagen->add_subcommand(
          "rationales", "generate scored rationales");
      rat_args->common.attach(cmd);
      cmd->add_option("--items", rat_args->items_path,
                      "collection item record file")
          ->required();
      cmd->add_option("--max-attempts", rat_args->max_attempts,
                      "seed-consistency retries per item");
      cmd->add_option("--out", rat_args->out_path, "rationale record file")
          ->required();
      cmd->callback([&run, rat_args] {
        run = [rat_args] { return cmd_datagen_rationales(*rat_args); };
      });
    }

    auto pairs_args = std::make_shared<DatagenPairsArgs>();
    {
      CLI::App* cmd = datagen->add_subcommand(
          "dpo-pairs", "collect chosen/rejected rationale pairs");
      pairs_args->common.attach(cmd);
      cmd->add_option("--items", pairs_args->items_path,
                      "collection item record file")
          ->required();
      cmd->add_option("--strategy", pairs_args->strategy,
                      "refined | harmonized | teacher");
      cmd->add_option("--samples", pairs_args->samples,
                      "teacher samples per item");
      cmd->add_option("--max-pairs", pairs_args->max_pairs,
                      "pair cap per item");
      cmd->add_option("--revision-rounds", pairs_args->revision_rounds,
                      "refined-strategy revision budget");
      cmd->add_option("--out", pairs_args->out_path,
                      "rationale pair record file")
          ->required();
      cmd->callback([&run, pairs_args] {
        run = [pairs_args] { return cmd_datagen_pairs(*pairs_args); };
      });
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kFatal;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFatal;
  }
}
