#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmeval/types.hpp"

namespace lmeval {

/// Sample Pearson correlation, two-pass. Throws on length mismatch,
/// fewer than two points, or zero variance in either input.
double pearson(std::span<const double> x, std::span<const double> y);

/// Fraction of positions where predicted matches gold.
double binary_accuracy(std::span<const bool> predicted,
                       std::span<const bool> gold);

/// How a tie verdict against a non-tie label is credited.
enum class TiePolicy { wrong, half_credit };

TiePolicy parse_tie_policy(std::string_view s);
std::string to_string(TiePolicy policy);

double pairwise_accuracy(std::span<const PrefLabel> verdicts,
                         std::span<const PrefLabel> labels, TiePolicy policy);

/// Fleiss' kappa over an items x categories count matrix. Every row must
/// sum to raters_per_item; rows with dropouts must be filtered upstream
/// (see pivot_annotations).
double fleiss_kappa(const std::vector<std::vector<int>>& counts,
                    int raters_per_item);

/// One rater's categorical judgment on one item.
struct AnnotationRecord {
  std::string item_id;
  std::string rater_id;
  std::string category;

  bool operator==(const AnnotationRecord&) const = default;
};

std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path);
void save_annotations(std::span<const AnnotationRecord> records,
                      const std::filesystem::path& path);

/// Annotations pivoted into the kappa count matrix. Items whose rater
/// count differs from the modal count are dropped and listed; the modal
/// tie-break prefers the larger rater count.
struct AnnotationPivot {
  std::vector<std::string> item_ids;    // kept, in first-appearance order
  std::vector<std::string> categories;  // sorted
  std::vector<std::vector<int>> counts;
  int raters_per_item = 0;
  std::vector<std::string> dropped_item_ids;
};

AnnotationPivot pivot_annotations(std::span<const AnnotationRecord> records);

}  // namespace lmeval
