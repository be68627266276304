#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lmeval/aggregation.hpp"
#include "lmeval/backend.hpp"
#include "lmeval/http_backend.hpp"
#include "lmeval/metrics.hpp"
#include "lmeval/retry.hpp"
#include "lmeval/scoring.hpp"
#include "lmeval/weightopt.hpp"

namespace lmeval::cli {

/// Fully resolved run settings: defaults, overlaid by the config file,
/// overlaid by flags. The resolved form is what gets digested and printed.
struct CliConfig {
  std::string backend = "mock";  // mock | http
  std::string fixtures;
  std::string student_fixtures;  // datagen only; empty = share the teacher
  HttpBackendConfig http{.url = "",
                         .model = "",
                         .api_key_env = "LMEVAL_API_KEY",
                         .timeout_seconds = 60};
  RetryPolicy retry;
  ScoringConfig scoring;
  std::string template_file;
  int parallelism = 8;
  std::uint64_t seed = 0;
  double tie_epsilon = 1e-9;
  TiePolicy tie_policy = TiePolicy::wrong;
  WeightOptConfig opt;  // seed/tie_epsilon are synced from the fields above
  bool verbose = false;
};

CliConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON of the resolved config (stable field order).
nlohmann::ordered_json resolved_json(const CliConfig& config);

/// Digest over the resolved config plus run-specific inputs (suite file
/// text, weights spec, record files), printed in every report.
std::string config_digest(const CliConfig& config, std::string_view extra);

std::string read_text_file(const std::filesystem::path& path);
std::string file_digest(const std::filesystem::path& path);

TemplateRegistry make_registry(const CliConfig& config);

/// Owns a concrete backend plus its retry wrapper.
class BackendHandle {
 public:
  BackendHandle(const CliConfig& config, const std::string& fixtures);
  Backend& backend() { return *retrying_; }

 private:
  std::unique_ptr<Backend> inner_;
  std::unique_ptr<RetryingBackend> retrying_;
};

/// Weights flag: uniform | decaying | learned:<file> | single:<index>.
struct WeightsSource {
  WeightStrategy strategy = WeightStrategy::uniform;
  std::string file;
  std::size_t index = 0;
  std::string spec = "uniform";
  std::vector<LearnedWeightsRecord> learned;
};

WeightsSource parse_weights_source(const std::string& spec);

/// Resolves the source to a concrete vector for k tests. Learned sources
/// pick the record matching (scope, scope_key), falling back to "global".
WeightVector weights_for(const WeightsSource& source, std::size_t k,
                         double decay_base,
                         WeightScope scope = WeightScope::global,
                         const std::string& scope_key = "global");

}  // namespace lmeval::cli
