#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hc4rc/baselines.hpp"
#include "support/synthetic.hpp"

namespace hc4rc {
namespace {

std::vector<Requirement> rows(const std::map<Label, std::size_t>& counts) {
  std::vector<Requirement> out;
  int i = 0;
  for (const auto& [label, n] : counts)
    for (std::size_t k = 0; k < n; ++k) out.push_back({"r" + std::to_string(++i), "p", "t", label});
  return out;
}

TEST(Oversample, BalancesToLargestClass) {
  const auto train = rows({{"A", 9}, {"B", 4}, {"C", 1}});
  const auto r = oversample(train, 1);
  const auto counts = class_counts(r.requirements);
  EXPECT_EQ(counts, (std::map<Label, std::size_t>{{"A", 9}, {"B", 9}, {"C", 9}}));
  ASSERT_EQ(r.provenance.size(), r.requirements.size());
  for (std::size_t i = 0; i < r.provenance.size(); ++i) EXPECT_EQ(r.provenance[i], r.requirements[i].req_id);
  // every original row survives
  std::set<std::string> ids(r.provenance.begin(), r.provenance.end());
  EXPECT_EQ(ids.size(), train.size());
  EXPECT_EQ(r.seed, 1u);
}

TEST(Oversample, DeterministicPerSeed) {
  const auto train = rows({{"A", 9}, {"B", 4}});
  EXPECT_EQ(oversample(train, 3).provenance, oversample(train, 3).provenance);
  EXPECT_NE(oversample(train, 3).provenance, oversample(train, 4).provenance);
}

TEST(Undersample, CutsToSmallestClassWithoutReplacement) {
  const auto train = rows({{"A", 9}, {"B", 4}, {"C", 2}});
  const auto r = undersample(train, 1);
  EXPECT_EQ(class_counts(r.requirements), (std::map<Label, std::size_t>{{"A", 2}, {"B", 2}, {"C", 2}}));
  std::set<std::string> ids(r.provenance.begin(), r.provenance.end());
  EXPECT_EQ(ids.size(), r.provenance.size());
}

TEST(Undersample, MedianTarget) {
  const auto train = rows({{"A", 9}, {"B", 4}, {"C", 2}});
  EXPECT_EQ(class_counts(undersample(train, 1, UndersampleTarget::Median).requirements),
            (std::map<Label, std::size_t>{{"A", 4}, {"B", 4}, {"C", 2}}));
}

TEST(Undersample, KeepsRelativeOrder) {
  const auto train = rows({{"A", 6}, {"B", 3}});
  const auto r = undersample(train, 5);
  for (std::size_t i = 1; i < r.provenance.size(); ++i)
    EXPECT_LT(std::stoi(r.provenance[i - 1].substr(1)), std::stoi(r.provenance[i].substr(1)));
}

TEST(Resampling, EmptyAndSingleClass) {
  EXPECT_TRUE(oversample({}, 0).requirements.empty());
  EXPECT_TRUE(undersample({}, 0).requirements.empty());
  const auto one = rows({{"A", 3}});
  EXPECT_EQ(oversample(one, 0).provenance, (std::vector<std::string>{"r1", "r2", "r3"}));
}

TEST(Flat, LearnsSeparableCorpus) {
  const auto c = synth::make({{"A", 10}, {"B", 5}, {"C", 3}}, 2, 9);
  std::vector<FeatureSet> fs;
  for (const auto& r : c.dataset.requirements) fs.push_back(select_features(c.annotations.at(r.req_id)));
  const auto m = train_flat(c.dataset.requirements, fs, HierarchyConfig{.svm = {.c = 10.0}, .fixed_plan = {}});
  EXPECT_EQ(m.model.class_labels, (std::vector<Label>{"A", "B", "C"}));
  for (std::size_t i = 0; i < fs.size(); ++i) EXPECT_EQ(predict_flat(m, fs[i]), c.dataset.requirements[i].label);
}

TEST(Flat, VocabularySourceOverridesTrainingRows) {
  const auto c = synth::make({{"A", 4}, {"B", 4}}, 2, 10);
  std::vector<FeatureSet> fs;
  for (const auto& r : c.dataset.requirements) fs.push_back(select_features(c.annotations.at(r.req_id)));
  std::vector<Requirement> first(c.dataset.requirements.begin(), c.dataset.requirements.begin() + 2);
  std::vector<FeatureSet> first_fs(fs.begin(), fs.begin() + 2);
  const auto m = train_flat(first, first_fs, {}, fs);
  EXPECT_EQ(m.vocab.dimension(), build_vocabulary(fs).dimension());
  EXPECT_EQ(m.vocab.source_ids.size(), fs.size());
}

}  // namespace
}  // namespace hc4rc
