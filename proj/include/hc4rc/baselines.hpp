#pragma once

// Comparison baselines: a flat one-vs-rest SVM over every class, optionally
// trained on a randomly over- or under-sampled copy of the training fold.
// Oversampling duplicates existing rows; no external data is added.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/hierarchy.hpp"
#include "hc4rc/rng.hpp"
#include "hc4rc/svm.hpp"
#include "hc4rc/vectorizer.hpp"

namespace hc4rc {

struct FlatModel {
  Vocabulary vocab;
  MulticlassModel model;
  Weighting weighting = Weighting::TfIdf;
  double c = 0.0;
  std::vector<std::string> grid_provenance;
};

// Same feature pipeline as the hierarchy, one model over all classes.
// `vocab_source` (when non-empty) is the document set the vocabulary is built
// from; it lets resampled training sets keep the vocabulary of the original
// fold while training on duplicated rows.
inline FlatModel train_flat(std::span<const Requirement> train, std::span<const FeatureSet> featuresets,
                            const HierarchyConfig& config = {}, std::span<const FeatureSet> vocab_source = {}) {
  detail::check_aligned(train, featuresets);
  FlatModel out;
  out.weighting = config.weighting;
  out.vocab = build_vocabulary(vocab_source.empty() ? featuresets : vocab_source, config.min_df);
  const auto X = vectorize_all(featuresets, out.vocab, config.weighting);
  std::vector<Label> y;
  std::vector<std::string> ids;
  for (const auto& r : train) {
    y.push_back(r.label);
    ids.push_back(r.req_id);
  }
  SvmConfig cfg = config.svm;
  cfg.c = out.c = detail::choose_c(X, y, ids, config, out.grid_provenance);
  out.model = train_multiclass(X, y, cfg);
  return out;
}

inline Label predict_flat(const FlatModel& m, const FeatureSet& features) {
  return predict(m.model, vectorize(features, m.vocab, m.weighting)).label;
}

struct ResampledTrainSet {
  std::vector<Requirement> requirements;
  std::vector<std::string> provenance;  // original req_id per row
  std::uint64_t seed = 0;
};

enum class UndersampleTarget { Minimum, Median };

inline constexpr std::string_view undersample_target_name(UndersampleTarget t) {
  return t == UndersampleTarget::Minimum ? "minimum" : "median";
}

namespace detail {

inline std::map<Label, std::vector<std::size_t>> rows_by_class(std::span<const Requirement> reqs) {
  std::map<Label, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < reqs.size(); ++i) by[reqs[i].label].push_back(i);
  return by;
}

inline ResampledTrainSet from_rows(std::span<const Requirement> reqs, std::span<const std::size_t> rows,
                                   std::uint64_t seed) {
  ResampledTrainSet out;
  out.seed = seed;
  for (auto r : rows) {
    out.requirements.push_back(reqs[r]);
    out.provenance.push_back(reqs[r].req_id);
  }
  return out;
}

}  // namespace detail

// Every smaller class is topped up to the largest class count by sampling
// its rows with replacement; the result is shuffled.
inline ResampledTrainSet oversample(std::span<const Requirement> train, std::uint64_t seed) {
  const auto by_class = detail::rows_by_class(train);
  std::size_t largest = 0;
  for (const auto& [label, rows] : by_class) largest = std::max(largest, rows.size());

  Rng rng(seed);
  std::vector<std::size_t> rows;
  for (const auto& [label, members] : by_class) {
    rows.insert(rows.end(), members.begin(), members.end());
    for (std::size_t extra = members.size(); extra < largest; ++extra)
      rows.push_back(members[static_cast<std::size_t>(rng.below(members.size()))]);
  }
  if (by_class.size() > 1) rng.shuffle(std::span<std::size_t>(rows));
  return detail::from_rows(train, rows, seed);
}

// Every class is cut down, without replacement, to the smallest (or median)
// class count. Surviving rows keep their original relative order.
inline ResampledTrainSet undersample(std::span<const Requirement> train, std::uint64_t seed,
                                     UndersampleTarget target = UndersampleTarget::Minimum) {
  const auto by_class = detail::rows_by_class(train);
  std::vector<std::size_t> counts;
  for (const auto& [label, rows] : by_class) counts.push_back(rows.size());
  std::sort(counts.begin(), counts.end());
  std::size_t keep = 0;
  if (!counts.empty()) {
    if (target == UndersampleTarget::Minimum) {
      keep = counts.front();
    } else {
      const auto mid = counts.size() / 2;
      keep = counts.size() % 2 ? counts[mid] : (counts[mid - 1] + counts[mid]) / 2;
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> rows;
  for (auto [label, members] : by_class) {
    if (members.size() > keep) {
      rng.shuffle(std::span<std::size_t>(members));
      members.resize(keep);
    }
    rows.insert(rows.end(), members.begin(), members.end());
  }
  std::sort(rows.begin(), rows.end());
  return detail::from_rows(train, rows, seed);
}

}  // namespace hc4rc
