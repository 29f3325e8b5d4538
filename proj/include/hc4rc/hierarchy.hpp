#pragma once

// Dataset decomposition and the three-classifier hierarchy.
//
// Classes are sorted by size (descending, ties by label) and moved into the
// majority subset until it holds at least half of the training rows; the rest
// form the minority subset. A binary classifier F_super separates the two
// subsets, and one one-vs-rest classifier per subset (F_maj, F_min) assigns
// the final label. Prediction follows the F_super routing with no way back.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"
#include "hc4rc/sr4fs.hpp"
#include "hc4rc/svm.hpp"
#include "hc4rc/vectorizer.hpp"

namespace hc4rc {

struct DecompositionPlan {
  std::vector<Label> maj_classes;  // descending count, ties by label
  std::vector<Label> min_classes;  // same order
  std::size_t maj_count = 0;
  std::size_t min_count = 0;
  std::size_t total = 0;
  std::vector<std::pair<Label, std::size_t>> sorted_counts;  // the full ordering, for tracing

  bool is_maj(const Label& label) const {
    for (const auto& l : maj_classes)
      if (l == label) return true;
    return false;
  }
};

// Throws ContractError("EmptyInput") when no class has a positive count.
inline DecompositionPlan decompose(const std::map<Label, std::size_t>& class_counts) {
  DecompositionPlan plan;
  for (const auto& [label, count] : class_counts) {
    plan.sorted_counts.emplace_back(label, count);
    plan.total += count;
  }
  if (plan.total == 0) throw ContractError("EmptyInput: decomposition needs at least one non-empty class");
  // std::map iteration is label-ascending, so a stable sort keeps label order on ties.
  std::stable_sort(plan.sorted_counts.begin(), plan.sorted_counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [label, count] : plan.sorted_counts) {
    // cumulative >= total / 2, in integers
    if (2 * plan.maj_count < plan.total) {
      plan.maj_classes.push_back(label);
      plan.maj_count += count;
    } else {
      plan.min_classes.push_back(label);
      plan.min_count += count;
    }
  }
  return plan;
}

struct HierarchyConfig {
  SvmConfig svm;
  bool grid_search = false;
  std::vector<double> grid{0.01, 0.1, 1.0, 10.0};
  std::size_t inner_folds = 3;
  std::size_t min_df = 1;
  Weighting weighting = Weighting::TfIdf;
  // When set, used instead of decomposing the training rows (the "global"
  // variant, decomposed once over the whole dataset).
  std::optional<DecompositionPlan> fixed_plan;
};

struct HierarchicalModel {
  DecompositionPlan plan;
  std::optional<LinearModel> f_super;   // absent when the minority subset is empty
  MulticlassModel f_maj;
  std::optional<MulticlassModel> f_min;  // absent together with f_super
  Vocabulary vocab;
  Weighting weighting = Weighting::TfIdf;
  std::vector<std::string> warnings;

  // C actually used per classifier (grid-searched or configured).
  double c_super = 0.0;
  double c_maj = 0.0;
  double c_min = 0.0;
  // req_ids each stage saw, for leakage audits.
  std::vector<std::string> plan_provenance;
  std::vector<std::string> grid_provenance;

  bool degenerate() const noexcept { return !f_super.has_value(); }
};

struct HierarchicalPrediction {
  Label label;
  bool routed_to_maj = true;
  double super_score = 0.0;
};

namespace detail {

struct BinaryFitter {
  std::vector<Label> operator()(std::span<const SparseVector> X, std::span<const Label> y,
                                std::span<const SparseVector> test, const SvmConfig& cfg) const {
    std::vector<int> targets;
    for (const auto& l : y) targets.push_back(l == "maj" ? 1 : -1);
    const auto m = train_binary(X, targets, cfg);
    std::vector<Label> out;
    for (const auto& x : test) out.push_back(m.decision(x) >= 0.0 ? "maj" : "min");
    return out;
  }
};

inline void check_aligned(std::span<const Requirement> reqs, std::span<const FeatureSet> featuresets) {
  if (reqs.size() != featuresets.size())
    throw ContractError("train: " + std::to_string(reqs.size()) + " requirements but " +
                        std::to_string(featuresets.size()) + " feature sets");
  for (std::size_t i = 0; i < reqs.size(); ++i)
    if (reqs[i].req_id != featuresets[i].req_id)
      throw ContractError("train: feature set " + featuresets[i].req_id + " misaligned with requirement " +
                          reqs[i].req_id);
}

template <typename Fitter = MulticlassFitter>
double choose_c(std::span<const SparseVector> X, std::span<const Label> y, std::span<const std::string> ids,
                const HierarchyConfig& cfg, std::vector<std::string>& provenance, Fitter fit = {}) {
  if (!cfg.grid_search) return cfg.svm.c;
  auto r = grid_search(X, y, cfg.grid, cfg.inner_folds, cfg.svm, ids, fit);
  provenance.insert(provenance.end(), r.provenance.begin(), r.provenance.end());
  return r.best_c;
}

}  // namespace detail

inline HierarchicalModel train_hierarchical(std::span<const Requirement> train, std::span<const FeatureSet> featuresets,
                                            const HierarchyConfig& config = {}) {
  detail::check_aligned(train, featuresets);
  if (train.size() < 2) throw ContractError("train_hierarchical: need at least 2 requirements");

  HierarchicalModel model;
  model.weighting = config.weighting;
  model.plan = config.fixed_plan ? *config.fixed_plan : decompose(class_counts(train));
  if (!config.fixed_plan)
    for (const auto& r : train) model.plan_provenance.push_back(r.req_id);
  model.vocab = build_vocabulary(featuresets, config.min_df);
  const auto X = vectorize_all(featuresets, model.vocab, config.weighting);

  std::vector<std::string> ids;
  std::vector<Label> labels;
  for (const auto& r : train) {
    ids.push_back(r.req_id);
    labels.push_back(r.label);
  }

  std::vector<SparseVector> maj_x, min_x;
  std::vector<Label> maj_y, min_y, super_y;
  std::vector<std::string> maj_ids, min_ids;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const bool maj = model.plan.is_maj(labels[i]);
    super_y.push_back(maj ? "maj" : "min");
    (maj ? maj_x : min_x).push_back(X[i]);
    (maj ? maj_y : min_y).push_back(labels[i]);
    (maj ? maj_ids : min_ids).push_back(ids[i]);
  }

  if (min_x.empty() || maj_x.empty()) {
    // Nothing to route: a flat model over whatever classes are present.
    model.warnings.push_back("DegenerateMin: minority subset empty; hierarchy reduces to a flat classifier");
    SvmConfig cfg = config.svm;
    cfg.c = model.c_maj = detail::choose_c(X, labels, ids, config, model.grid_provenance);
    model.f_maj = train_multiclass(X, labels, cfg);
    return model;
  }
  if (model.plan.min_classes.size() <= 1 || std::set<Label>(min_y.begin(), min_y.end()).size() <= 1)
    model.warnings.push_back("DegenerateMin: minority subset has a single class; F_min is a constant predictor");

  SvmConfig super_cfg = config.svm;
  super_cfg.c = model.c_super =
      detail::choose_c(X, super_y, ids, config, model.grid_provenance, detail::BinaryFitter{});
  std::vector<int> targets;
  for (const auto& l : super_y) targets.push_back(l == "maj" ? 1 : -1);
  model.f_super = train_binary(X, targets, super_cfg);
  model.f_super->positive_label = "maj";
  model.f_super->negative_label = "min";

  SvmConfig maj_cfg = config.svm;
  maj_cfg.c = model.c_maj = detail::choose_c(maj_x, maj_y, maj_ids, config, model.grid_provenance);
  maj_cfg.seed = derive_seed(config.svm.seed, 1000);
  model.f_maj = train_multiclass(maj_x, maj_y, maj_cfg);

  SvmConfig min_cfg = config.svm;
  min_cfg.c = model.c_min = detail::choose_c(min_x, min_y, min_ids, config, model.grid_provenance);
  min_cfg.seed = derive_seed(config.svm.seed, 2000);
  model.f_min = train_multiclass(min_x, min_y, min_cfg);
  return model;
}

inline HierarchicalPrediction predict_hierarchical(const HierarchicalModel& model, const SparseVector& x) {
  if (x.dimension != model.vocab.dimension())
    throw ContractError("DimensionMismatch: vector of dimension " + std::to_string(x.dimension) +
                        " for a vocabulary of " + std::to_string(model.vocab.dimension()));
  if (model.degenerate()) return {predict(model.f_maj, x).label, true, 0.0};
  HierarchicalPrediction p;
  p.super_score = model.f_super->decision(x);
  p.routed_to_maj = p.super_score >= 0.0;
  p.label = predict(p.routed_to_maj ? model.f_maj : *model.f_min, x).label;
  return p;
}

inline HierarchicalPrediction predict_hierarchical(const HierarchicalModel& model, const FeatureSet& features) {
  return predict_hierarchical(model, vectorize(features, model.vocab, model.weighting));
}

}  // namespace hc4rc
