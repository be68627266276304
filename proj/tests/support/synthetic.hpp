#pragma once

// Shared synthetic fixtures: seeded score-pair generators, mock scoring
// fixtures, and a tiny process runner for CLI tests.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lmeval/backend.hpp"
#include "lmeval/mock_backend.hpp"
#include "lmeval/rng.hpp"
#include "lmeval/scoring.hpp"
#include "lmeval/types.hpp"
#include "lmeval/weightopt.hpp"

namespace testsupport {

using namespace lmeval;

// --- synthetic scored-pair sets -----------------------------------------

/// K=3 set where test 0 alone carries the label and tests 1..2 are
/// independent noise. Labels are never ties.
inline std::vector<ScoredPair> predictive_pairs(std::size_t n,
                                                std::uint64_t seed) {
  Rng rng(seed);
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
    pair.dataset = "synthetic";
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

/// Two-section K=3 benchmark: section "alpha" is predicted by test 0,
/// "beta" by test 1; the off-section tests are loud noise so no single
/// weight vector can serve both sections.
inline std::vector<ScoredPair> two_section_pairs(std::size_t per_section,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScoredPair> pairs;
  pairs.reserve(2 * per_section);
  for (int s = 0; s < 2; ++s) {
    const std::size_t signal = static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < per_section; ++i) {
      const double base = rng.uniform(2.0, 4.0);
      const double delta = rng.uniform(0.3, 0.8) * (rng.coin() ? 1.0 : -1.0);
      ScoredPair pair;
      pair.scores_a.resize(3);
      pair.scores_b.resize(3);
      for (std::size_t k = 0; k < 3; ++k) {
        if (k == signal) {
          pair.scores_a[k] = base + delta / 2;
          pair.scores_b[k] = base - delta / 2;
        } else {
          pair.scores_a[k] = rng.uniform(1.0, 5.0);
          pair.scores_b[k] = rng.uniform(1.0, 5.0);
        }
      }
      pair.label = delta > 0 ? PrefLabel::a : PrefLabel::b;
      pair.dataset = "synthetic";
      pair.section = s == 0 ? "alpha" : "beta";
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

// --- mock scoring fixtures ----------------------------------------------

/// Backend response whose final position carries logprobs for the given
/// score distribution; zero-probability tokens are omitted.
inline BackendResponse score_response(const std::vector<int>& support,
                                      const std::vector<double>& probs) {
  TokenLogprobs position;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (probs[i] > probs[argmax]) argmax = i;
    if (probs[i] > 0.0) {
      position[std::to_string(support[i])] = std::log(probs[i]);
    }
  }
  BackendResponse response;
  response.text = std::to_string(support[argmax]);
  response.token_logprobs = std::vector<TokenLogprobs>{position};
  return response;
}

inline BackendResponse one_hot_response(const std::vector<int>& support,
                                        int score) {
  std::vector<double> probs(support.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == score) probs[i] = 1.0;
  }
  return score_response(support, probs);
}

/// Registers one fixture per suite test so `exchange` scores one-hot at
/// `score` on every test.
inline void add_exchange_fixture(MockBackend& mock, const TestSuite& suite,
                                 const Exchange& exchange, int score,
                                 const ScoringConfig& config) {
  for (const auto& test : suite.tests) {
    mock.add(build_scoring_request(test, exchange, config),
             one_hot_response(config.support, score));
  }
}

// --- temp dirs and process helpers --------------------------------------

/// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    std::uint64_t nonce =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(nonce));
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + buf);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Runs a shell command, capturing stdout/stderr into files under `dir`.
inline RunResult run_command(const std::string& command, const TempDir& dir,
                             const std::string& tag) {
  const auto out_path = dir.file(tag + ".out");
  const auto err_path = dir.file(tag + ".err");
  const std::string full = command + " > " + out_path.string() + " 2> " +
                           err_path.string();
  const int status = std::system(full.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

}  // namespace testsupport
