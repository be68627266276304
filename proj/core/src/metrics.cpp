#include "lmeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "jsonl_io.hpp"
#include "lmeval/error.hpp"

namespace lmeval {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(fmt::format("pearson: {} vs {} points", x.size(), y.size()));
  }
  if (x.size() < 2) throw Error("pearson: need at least 2 points");

  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("pearson: first input has zero variance");
  if (syy == 0.0) throw Error("pearson: second input has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double binary_accuracy(std::span<const bool> predicted,
                       std::span<const bool> gold) {
  if (predicted.size() != gold.size()) {
    throw Error(fmt::format("binary_accuracy: {} predictions vs {} labels",
                            predicted.size(), gold.size()));
  }
  if (predicted.empty()) throw Error("binary_accuracy: empty inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

TiePolicy parse_tie_policy(std::string_view s) {
  if (s == "wrong") return TiePolicy::wrong;
  if (s == "half_credit") return TiePolicy::half_credit;
  throw Error(fmt::format(
      "unknown tie policy '{}' (allowed: wrong, half_credit)", s));
}

std::string to_string(TiePolicy policy) {
  return policy == TiePolicy::wrong ? "wrong" : "half_credit";
}

double pairwise_accuracy(std::span<const PrefLabel> verdicts,
                         std::span<const PrefLabel> labels, TiePolicy policy) {
  if (verdicts.size() != labels.size()) {
    throw Error(fmt::format("pairwise_accuracy: {} verdicts vs {} labels",
                            verdicts.size(), labels.size()));
  }
  if (verdicts.empty()) throw Error("pairwise_accuracy: empty inputs");
  double credit = 0.0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == labels[i]) {
      credit += 1.0;
    } else if (policy == TiePolicy::half_credit &&
               verdicts[i] == PrefLabel::tie && labels[i] != PrefLabel::tie) {
      credit += 0.5;
    }
  }
  return credit / static_cast<double>(verdicts.size());
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts,
                    int raters_per_item) {
  if (counts.size() < 2) throw Error("fleiss_kappa: need at least 2 items");
  if (raters_per_item < 2) {
    throw Error("fleiss_kappa: need at least 2 raters per item");
  }
  const std::size_t n_cats = counts.front().size();
  if (n_cats < 2) throw Error("fleiss_kappa: need at least 2 categories");

  const double n = raters_per_item;
  const double n_items = static_cast<double>(counts.size());
  std::vector<double> category_mass(n_cats, 0.0);
  double p_bar = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& row = counts[i];
    if (row.size() != n_cats) {
      throw Error(fmt::format("fleiss_kappa: row {} has {} categories, row 0 "
                              "has {}",
                              i, row.size(), n_cats));
    }
    int row_sum = 0;
    double sq = 0.0;
    for (std::size_t j = 0; j < n_cats; ++j) {
      if (row[j] < 0) throw Error("fleiss_kappa: negative count");
      row_sum += row[j];
      sq += static_cast<double>(row[j]) * row[j];
      category_mass[j] += row[j];
    }
    if (row_sum != raters_per_item) {
      throw Error(fmt::format(
          "fleiss_kappa: row {} sums to {}, expected {} raters", i, row_sum,
          raters_per_item));
    }
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  p_bar /= n_items;

  double p_e = 0.0;
  for (double mass : category_mass) {
    const double p_j = mass / (n_items * n);
    p_e += p_j * p_j;
  }
  if (p_e >= 1.0) {
    throw Error("fleiss_kappa: all mass in one category, kappa undefined");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

namespace {

using detail::ordered_json;
using detail::require;

ordered_json annotation_to_json(const AnnotationRecord& a) {
  ordered_json j;
  j["item_id"] = a.item_id;
  j["rater_id"] = a.rater_id;
  j["category"] = a.category;
  return j;
}

AnnotationRecord annotation_from_json(const ordered_json& j) {
  AnnotationRecord a;
  a.item_id = require(j, "item_id").get<std::string>();
  a.rater_id = require(j, "rater_id").get<std::string>();
  a.category = require(j, "category").get<std::string>();
  if (a.item_id.empty() || a.rater_id.empty() || a.category.empty()) {
    throw Error("annotation fields must be non-empty");
  }
  return a;
}

}  // namespace

std::vector<AnnotationRecord> load_annotations(
    const std::filesystem::path& path) {
  return detail::load_lines<AnnotationRecord>(path, annotation_from_json);
}

void save_annotations(std::span<const AnnotationRecord> records,
                      const std::filesystem::path& path) {
  detail::save_lines(records, path, annotation_to_json);
}

AnnotationPivot pivot_annotations(std::span<const AnnotationRecord> records) {
  if (records.empty()) throw Error("pivot_annotations: no records");

  std::vector<std::string> item_order;
  std::map<std::string, std::map<std::string, int>> by_item;  // item -> cat -> n
  std::set<std::pair<std::string, std::string>> seen;         // (item, rater)
  std::set<std::string> category_set;
  for (const auto& rec : records) {
    if (!seen.insert({rec.item_id, rec.rater_id}).second) {
      throw Error(fmt::format("rater '{}' rated item '{}' twice", rec.rater_id,
                              rec.item_id));
    }
    if (!by_item.contains(rec.item_id)) item_order.push_back(rec.item_id);
    ++by_item[rec.item_id][rec.category];
    category_set.insert(rec.category);
  }

  // Modal rater count across items; prefer the larger count on ties.
  std::map<int, int> count_freq;
  for (const auto& [item, cats] : by_item) {
    int total = 0;
    for (const auto& [cat, n] : cats) total += n;
    ++count_freq[total];
  }
  int modal = 0, modal_freq = 0;
  for (const auto& [count, freq] : count_freq) {
    if (freq >= modal_freq) {  // map iterates ascending, >= keeps the largest
      modal = count;
      modal_freq = freq;
    }
  }

  AnnotationPivot out;
  out.categories.assign(category_set.begin(), category_set.end());
  out.raters_per_item = modal;
  for (const auto& item : item_order) {
    const auto& cats = by_item.at(item);
    int total = 0;
    for (const auto& [cat, n] : cats) total += n;
    if (total != modal) {
      out.dropped_item_ids.push_back(item);
      continue;
    }
    std::vector<int> row(out.categories.size(), 0);
    for (std::size_t j = 0; j < out.categories.size(); ++j) {
      if (auto it = cats.find(out.categories[j]); it != cats.end()) {
        row[j] = it->second;
      }
    }
    out.item_ids.push_back(item);
    out.counts.push_back(std::move(row));
  }
  if (out.counts.empty()) {
    throw Error("pivot_annotations: every item dropped");
  }
  return out;
}

}  // namespace lmeval
