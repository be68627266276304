#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmeval/backend.hpp"
#include "lmeval/types.hpp"

namespace lmeval {

// --- teacher-output parsing (one delimiter convention per kind) ---

/// Extracts the item texts from a numbered list ("1. ..." / "2) ...").
/// Lines without a leading number are ignored.
std::vector<std::string> parse_numbered_list(std::string_view text);

struct ScoredRationale {
  std::string rationale;
  int score = 0;

  bool operator==(const ScoredRationale&) const = default;
};

/// Splits teacher output at the last "Score:" sentinel into rationale text
/// and an integer score. Returns nullopt when the sentinel or the integer
/// is missing.
std::optional<ScoredRationale> parse_scored_rationale(std::string_view text);

// --- request builders (public so fixtures can be precomputed) ---

BackendRequest build_testgen_request(const std::string& prompt,
                                     std::span<const std::string> responses,
                                     int n);

BackendRequest build_contrastive_request(const std::string& prompt,
                                         const UnitTest& test, int target_score,
                                         std::span<const int> support);

/// `variant` distinguishes repeated samples of the same item so that
/// caching layers and fixture files key them separately.
BackendRequest build_rationale_request(const UnitTest& test,
                                       const Exchange& exchange, int variant,
                                       std::span<const int> support);

BackendRequest build_revision_request(const UnitTest& test,
                                      const Exchange& exchange,
                                      const std::string& rationale,
                                      int gold_score, int round,
                                      std::span<const int> support);

/// Asks the teacher to rewrite `own_rationale` for `exchange.response` so
/// it stays consistent with how `other_response` was judged.
BackendRequest build_harmonize_request(const UnitTest& test,
                                       const Exchange& exchange,
                                       const std::string& other_response,
                                       const std::string& own_rationale,
                                       const std::string& other_rationale,
                                       std::span<const int> support);

// --- stage 1: unit-test generation ---

struct GeneratedTests {
  std::vector<UnitTest> tests;  // emission order, ids gen-1..gen-k
  int n_requested = 0;
  std::size_t n_parsed = 0;    // numbered items before filtering
  std::size_t n_dropped = 0;   // failed validation or duplicate
  bool shortfall = false;      // fewer than n_requested survived
};

/// One teacher call; candidates are validated as questions and de-duped
/// case-insensitively. At most one or two responses may steer generation.
GeneratedTests generate_unit_tests(const std::string& prompt,
                                   std::span<const std::string> responses,
                                   int n, Backend& teacher);

// --- stage 2: contrastive responses ---

struct ContrastiveResponse {
  std::string response;
  int target_score = 0;

  bool operator==(const ContrastiveResponse&) const = default;
};

std::vector<ContrastiveResponse> generate_contrastive(
    const std::string& prompt, const UnitTest& test,
    std::span<const int> target_scores, std::span<const int> support,
    Backend& teacher);

/// Every distinct-target combination becomes a preference pair labelled
/// toward the higher target.
std::vector<PreferencePair> contrastive_to_pairs(
    const std::string& prompt, std::span<const ContrastiveResponse> responses,
    const std::string& dataset);

// --- stage 3: rationale + score generation ---

struct RationaleOutcome {
  std::optional<ScoredRationale> accepted;
  std::vector<ScoredRationale> mismatched;  // parsed but off-seed attempts
  int attempts = 0;
};

/// Generates a scored rationale. With a seed score, attempts are retried
/// until the parsed score matches or max_attempts is spent (the mismatches
/// come back for inspection). A parsed score outside the support counts as
/// a failed parse. Throws only when no attempt parses at all.
RationaleOutcome generate_rationale_scored(const UnitTest& test,
                                           const Exchange& exchange,
                                           std::optional<int> seed_score,
                                           Backend& teacher, int max_attempts,
                                           std::span<const int> support,
                                           int variant_base = 0);

// --- rationale preference pairs for DPO ---

enum class PairStrategy { refined, harmonized, teacher };

PairStrategy parse_pair_strategy(std::string_view s);
std::string to_string(PairStrategy strategy);

struct RationalePair {
  std::string unit_test_id;
  std::string prompt;
  std::string response;
  std::string chosen_rationale;
  std::string rejected_rationale;
  PairStrategy strategy = PairStrategy::teacher;
  int chosen_score = 0;
  int rejected_score = 0;

  bool operator==(const RationalePair&) const = default;
};

/// Invariant gate: distinct rationales, chosen score within support.
void validate_rationale_pair(const RationalePair& pair,
                             std::span<const int> support);

/// One item of pair-collection input. gold_score is required by the
/// teacher and refined strategies; response_b and label by harmonized.
struct PairCollectionItem {
  UnitTest test;
  std::string prompt;
  std::string response;
  std::optional<int> gold_score;
  std::optional<std::string> response_b;
  std::optional<PrefLabel> label;

  bool operator==(const PairCollectionItem&) const = default;
};

struct CollectConfig {
  int samples_per_item = 4;      // teacher strategy draws per item
  std::size_t max_pairs_per_item = 4;
  int revision_rounds = 1;       // refined strategy retry budget
  std::vector<int> support{1, 2, 3, 4, 5};
  int parallelism = 8;
};

struct CollectResult {
  std::vector<RationalePair> pairs;  // input-index order
  std::size_t n_items = 0;
  std::size_t n_skipped = 0;   // unusable inputs or nothing to fix
  std::size_t n_dropped = 0;   // candidate pairs rejected by a gate
  std::vector<std::string> diagnostics;
};

/// Collects chosen/rejected rationale pairs per strategy:
///   teacher    — sample teacher rationales, pair correct x incorrect
///                against the gold score (capped per item);
///   refined    — teacher revises a wrong student rationale until it
///                reaches the gold score; revision beats the original;
///   harmonized — both sides' student rationales are harmonized by the
///                teacher; on the preferred side the harmonized rationale
///                beats the student's original, gated on the harmonized
///                scores actually ranking the preferred response first.
/// Items are independent and fan out over config.parallelism threads;
/// output order and diagnostics stay in input order.
CollectResult collect_rationale_pairs(PairStrategy strategy,
                                      std::span<const PairCollectionItem> items,
                                      Backend& student, Backend& teacher,
                                      const CollectConfig& config);

// --- record IO ---

std::vector<RationalePair> load_rationale_pairs(
    const std::filesystem::path& path);
void save_rationale_pairs(std::span<const RationalePair> records,
                          const std::filesystem::path& path);

std::vector<PairCollectionItem> load_collection_items(
    const std::filesystem::path& path);
void save_collection_items(std::span<const PairCollectionItem> records,
                           const std::filesystem::path& path);

/// Accepted output of the rationale stage, one line per exchange.
struct RationaleRecord {
  std::string unit_test_id;
  std::string prompt;
  std::string response;
  std::string rationale;
  int score = 0;

  bool operator==(const RationaleRecord&) const = default;
};

std::vector<RationaleRecord> load_rationale_records(
    const std::filesystem::path& path);
void save_rationale_records(std::span<const RationaleRecord> records,
                            const std::filesystem::path& path);

}  // namespace lmeval
