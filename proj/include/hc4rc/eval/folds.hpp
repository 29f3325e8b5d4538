#pragma once

// Cross-validation fold plans: label-stratified k-fold and project-grouped
// ("p-fold") splits.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"
#include "hc4rc/rng.hpp"

namespace hc4rc {

enum class FoldKind { Stratified, Project };

inline constexpr std::string_view fold_kind_name(FoldKind kind) {
  return kind == FoldKind::Stratified ? "stratified" : "project";
}

struct FoldPlan {
  FoldKind kind = FoldKind::Stratified;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // aligned with the input rows

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] != fold) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_of) ++sizes[f];
    return sizes;
  }
};

// Per class (sorted label order) the rows are shuffled and dealt round-robin,
// continuing from the fold where the previous class stopped so fold totals
// also stay within one of each other. Each class lands floor or ceil of
// n_k / k times in every fold.
inline FoldPlan plan_stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k == 0 || k > labels.size())
    throw DegenerateError("KTooLarge: cannot split " + std::to_string(labels.size()) + " rows into " +
                          std::to_string(k) + " folds");
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  FoldPlan plan{FoldKind::Stratified, k, seed, std::vector<std::size_t>(labels.size(), 0)};
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& [label, rows] : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (auto row : rows) {
      plan.fold_of[row] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

// Whole projects go to folds. Projects are taken largest first (ties by id)
// and each goes to the fold with the fewest requirements among those that
// still have room, where room keeps every fold at floor(P/k) or ceil(P/k)
// projects. 47 projects into 10 folds therefore always gives 7 folds of 5
// and 3 of 4. The seed is recorded but the plan is deterministic without it.
inline FoldPlan plan_project_fold(std::span<const std::string> projects, std::size_t k, std::uint64_t seed) {
  std::map<std::string, std::size_t> sizes;
  for (const auto& p : projects) ++sizes[p];
  if (k == 0 || sizes.size() < k)
    throw DegenerateError("TooFewProjects: " + std::to_string(sizes.size()) + " projects for " + std::to_string(k) +
                          " folds");

  std::vector<std::pair<std::string, std::size_t>> order(sizes.begin(), sizes.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  const std::size_t base = order.size() / k;
  const std::size_t extra = order.size() % k;
  std::vector<std::size_t> fold_rows(k, 0);
  std::vector<std::size_t> fold_projects(k, 0);
  std::size_t folds_at_ceiling = 0;
  std::map<std::string, std::size_t> project_fold;

  for (const auto& [project, count] : order) {
    std::size_t best = k;
    for (std::size_t f = 0; f < k; ++f) {
      const bool open = fold_projects[f] < base || (fold_projects[f] == base && folds_at_ceiling < extra);
      if (open && (best == k || fold_rows[f] < fold_rows[best])) best = f;
    }
    if (fold_projects[best] == base) ++folds_at_ceiling;
    ++fold_projects[best];
    fold_rows[best] += count;
    project_fold[project] = best;
  }

  FoldPlan plan{FoldKind::Project, k, seed, {}};
  plan.fold_of.reserve(projects.size());
  for (const auto& p : projects) plan.fold_of.push_back(project_fold.at(p));
  return plan;
}

}  // namespace hc4rc
