#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hc4rc/eval/folds.hpp"

namespace hc4rc {
namespace {

void expect_stratified(const std::vector<Label>& labels, std::size_t k, const FoldPlan& plan) {
  std::map<Label, std::size_t> n;
  std::map<Label, std::vector<std::size_t>> per_fold;
  for (const auto& l : labels) {
    ++n[l];
    per_fold[l].assign(k, 0);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ASSERT_LT(plan.fold_of[i], k);
    ++per_fold[labels[i]][plan.fold_of[i]];
  }
  for (const auto& [l, counts] : per_fold)
    for (auto c : counts) {
      ASSERT_GE(c, n[l] / k) << l;
      ASSERT_LE(c, (n[l] + k - 1) / k) << l;
    }
  const auto sizes = plan.fold_sizes();
  ASSERT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1u);
}

TEST(Stratified, PerClassBoundOnRandomLabels) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t classes = 1 + gen() % 12;
    const std::size_t n = 10 + gen() % 400;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("C" + std::to_string(gen() % classes));
    expect_stratified(labels, 10, plan_stratified_kfold(labels, 10, trial));
  }
}

TEST(Stratified, TrainAndTestPartitionRows) {
  std::vector<Label> labels(37, "A");
  for (int i = 0; i < 13; ++i) labels.push_back("B");
  const auto plan = plan_stratified_kfold(labels, 5, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    const auto tr = plan.train_indices(f), te = plan.test_indices(f);
    EXPECT_EQ(tr.size() + te.size(), labels.size());
    std::set<std::size_t> all(tr.begin(), tr.end());
    for (auto i : te) EXPECT_TRUE(all.insert(i).second);
  }
}

TEST(Stratified, SeedControlsShuffle) {
  std::vector<Label> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 3 ? "A" : "B");
  EXPECT_EQ(plan_stratified_kfold(labels, 10, 5).fold_of, plan_stratified_kfold(labels, 10, 5).fold_of);
  EXPECT_NE(plan_stratified_kfold(labels, 10, 5).fold_of, plan_stratified_kfold(labels, 10, 6).fold_of);
}

TEST(Stratified, KTooLarge) {
  const std::vector<Label> labels{"A", "B", "C"};
  EXPECT_THROW(plan_stratified_kfold(labels, 4, 0), DegenerateError);
  EXPECT_THROW(plan_stratified_kfold(labels, 0, 0), DegenerateError);
  EXPECT_NO_THROW(plan_stratified_kfold(labels, 3, 0));
}

std::vector<std::string> projects_with_sizes(std::size_t count, std::mt19937_64& gen) {
  std::vector<std::string> rows;
  for (std::size_t p = 0; p < count; ++p) {
    const auto n = 1 + gen() % 60;
    for (std::size_t i = 0; i < n; ++i) rows.push_back("P" + std::to_string(p));
  }
  std::shuffle(rows.begin(), rows.end(), gen);
  return rows;
}

TEST(ProjectFold, FortySevenProjectsGiveFourOrFivePerFold) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rows = projects_with_sizes(47, gen);
    const auto plan = plan_project_fold(rows, 10, trial);
    std::map<std::string, std::set<std::size_t>> folds_of_project;
    std::vector<std::set<std::string>> projects_in(10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      folds_of_project[rows[i]].insert(plan.fold_of[i]);
      projects_in[plan.fold_of[i]].insert(rows[i]);
    }
    for (const auto& [p, folds] : folds_of_project) ASSERT_EQ(folds.size(), 1u) << p;
    for (const auto& ps : projects_in) {
      ASSERT_GE(ps.size(), 4u);
      ASSERT_LE(ps.size(), 5u);
    }
  }
}

TEST(ProjectFold, TooFewProjects) {
  const std::vector<std::string> rows{"a", "a", "b"};
  EXPECT_THROW(plan_project_fold(rows, 3, 0), DegenerateError);
  EXPECT_NO_THROW(plan_project_fold(rows, 2, 0));
}

TEST(ProjectFold, BalancesRowsAmongEqualProjectCounts) {
  // 4 projects into 2 folds: sizes 10, 9, 2, 1 -> {10, 1} and {9, 2}.
  std::vector<std::string> rows;
  for (auto [p, n] : std::vector<std::pair<std::string, int>>{{"a", 10}, {"b", 9}, {"c", 2}, {"d", 1}})
    for (int i = 0; i < n; ++i) rows.push_back(p);
  const auto plan = plan_project_fold(rows, 2, 0);
  const auto sizes = plan.fold_sizes();
  EXPECT_EQ(std::set<std::size_t>(sizes.begin(), sizes.end()), (std::set<std::size_t>{11}));
}

}  // namespace
}  // namespace hc4rc
