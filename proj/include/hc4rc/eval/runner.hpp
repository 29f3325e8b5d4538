#pragma once

// Cross-validated experiment runner. For each fold the vocabulary, the
// decomposition plan, any resampling and any grid search see the training
// split only; the test split is vectorized against the training vocabulary
// and predicted. Every stage records the req_ids it consumed so a run can be
// audited for leakage afterwards.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hc4rc/baselines.hpp"
#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"
#include "hc4rc/eval/folds.hpp"
#include "hc4rc/eval/metrics.hpp"
#include "hc4rc/hierarchy.hpp"
#include "hc4rc/sr4fs.hpp"

namespace hc4rc {

enum class Strategy { Hc4rc, Flat, FlatOversample, FlatUndersample };

inline constexpr std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Hc4rc: return "hc4rc";
    case Strategy::Flat: return "flat";
    case Strategy::FlatOversample: return "flat+oversample";
    case Strategy::FlatUndersample: return "flat+undersample";
  }
  return "?";
}

inline constexpr Strategy kAllStrategies[] = {Strategy::Hc4rc, Strategy::Flat, Strategy::FlatOversample,
                                              Strategy::FlatUndersample};

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  return std::nullopt;
}

struct ExperimentConfig {
  HierarchyConfig model;
  FeatureMode feature_mode = FeatureMode::Plain;
  bool global_decomposition = false;
  UndersampleTarget undersample_target = UndersampleTarget::Minimum;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct FoldAudit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> vocab_ids;
  std::vector<std::string> plan_ids;
  std::vector<std::string> resample_ids;
  std::vector<std::string> grid_ids;
};

struct FoldResult {
  std::size_t index = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t vocabulary_size = 0;
  std::size_t unseen_test = 0;  // test rows whose class never occurs in the training split
  ConfusionMatrix confusion;
  std::optional<DecompositionPlan> plan;
  std::map<std::string, double> chosen_c;
  std::vector<std::string> warnings;
  FoldAudit audit;
};

struct MetricSummary {
  PerClassMetrics per_class;
  MacroMetrics macro;
  double micro = 0.0;
  double weighted_f1 = 0.0;
};

inline MetricSummary summarize(const ConfusionMatrix& cm) {
  MetricSummary s;
  s.per_class = per_class_prf(cm);
  s.macro = macro_metrics(s.per_class);
  s.micro = cm.total() ? micro_metrics(cm) : 0.0;
  s.weighted_f1 = weighted_f1(s.per_class);
  return s;
}

struct EvaluationReport {
  Strategy strategy = Strategy::Hc4rc;
  std::vector<Label> labels;
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled;
  double elapsed_seconds = 0.0;  // informational, never serialized into report.json

  MetricSummary pooled_metrics() const { return summarize(pooled); }

  // Unweighted mean of per-fold figures.
  MacroMetrics mean_over_folds(double* micro = nullptr) const {
    MacroMetrics m;
    double mic = 0.0;
    for (const auto& f : folds) {
      const auto s = summarize(f.confusion);
      m.precision += s.macro.precision;
      m.recall += s.macro.recall;
      m.f1 += s.macro.f1;
      m.mean_class_f1 += s.macro.mean_class_f1;
      mic += s.micro;
    }
    const auto k = static_cast<double>(std::max<std::size_t>(folds.size(), 1));
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
    m.mean_class_f1 /= k;
    if (micro) *micro = mic / k;
    return m;
  }
};

// SR4FS features for every requirement, aligned with dataset order.
// Throws DataError("MissingAnnotation") listing up to five absent req_ids.
inline std::vector<FeatureSet> extract_features(const Dataset& dataset, const Annotations& annotations,
                                                FeatureMode mode = FeatureMode::Plain,
                                                const WordSet& stopwords = default_stopwords()) {
  std::vector<std::string> missing;
  for (const auto& r : dataset.requirements)
    if (!annotations.contains(r.req_id)) missing.push_back(r.req_id);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) list += (i ? ", " : "") + missing[i];
    throw DataError("MissingAnnotation: " + std::to_string(missing.size()) + " requirement(s) without annotation (" +
                    list + (missing.size() > 5 ? ", ..." : "") + ")");
  }
  std::vector<FeatureSet> out;
  out.reserve(dataset.requirements.size());
  for (const auto& r : dataset.requirements) {
    auto fs = select_features(annotations.at(r.req_id), mode, stopwords);
    fs.req_id = r.req_id;
    out.push_back(std::move(fs));
  }
  return out;
}

// Annotation req_ids with no matching requirement; reported as warnings.
inline std::vector<std::string> unknown_annotation_ids(const Dataset& dataset, const Annotations& annotations) {
  std::unordered_set<std::string> ids;
  for (const auto& r : dataset.requirements) ids.insert(r.req_id);
  std::vector<std::string> out;
  for (const auto& [id, sentences] : annotations)
    if (!ids.contains(id)) out.push_back(id);
  return out;
}

namespace detail {

inline FoldResult run_fold(const Dataset& dataset, std::span<const FeatureSet> features, Strategy strategy,
                           const FoldPlan& plan, std::size_t fold, const ExperimentConfig& config) {
  FoldResult result;
  result.index = fold;
  const auto train_idx = plan.train_indices(fold);
  const auto test_idx = plan.test_indices(fold);
  result.n_train = train_idx.size();
  result.n_test = test_idx.size();

  std::vector<Requirement> train;
  std::vector<FeatureSet> train_fs;
  std::set<Label> train_labels;
  for (auto i : train_idx) {
    train.push_back(dataset.requirements[i]);
    train_fs.push_back(features[i]);
    train_labels.insert(dataset.requirements[i].label);
    result.audit.train_ids.push_back(dataset.requirements[i].req_id);
  }
  for (auto i : test_idx) result.audit.test_ids.push_back(dataset.requirements[i].req_id);

  HierarchyConfig mcfg = config.model;
  const auto fold_seed = derive_seed(config.seed, fold);
  mcfg.svm.seed = fold_seed;

  std::vector<Label> y_true, y_pred;
  if (strategy == Strategy::Hc4rc) {
    if (config.global_decomposition) {
      mcfg.fixed_plan = decompose(dataset.class_counts());
      for (const auto& r : dataset.requirements) result.audit.plan_ids.push_back(r.req_id);
    }
    const auto model = train_hierarchical(train, train_fs, mcfg);
    result.plan = model.plan;
    result.vocabulary_size = model.vocab.dimension();
    result.audit.vocab_ids = model.vocab.source_ids;
    if (!config.global_decomposition) result.audit.plan_ids = model.plan_provenance;
    result.audit.grid_ids = model.grid_provenance;
    result.warnings = model.warnings;
    if (model.degenerate()) {
      result.chosen_c["flat"] = model.c_maj;
    } else {
      result.chosen_c = {{"f_super", model.c_super}, {"f_maj", model.c_maj}, {"f_min", model.c_min}};
    }
    for (auto i : test_idx) {
      y_true.push_back(dataset.requirements[i].label);
      y_pred.push_back(predict_hierarchical(model, features[i]).label);
    }
  } else {
    std::vector<Requirement> fit_reqs = train;
    std::vector<FeatureSet> fit_fs = train_fs;
    if (strategy != Strategy::Flat) {
      const auto resampled = strategy == Strategy::FlatOversample
                                 ? oversample(train, fold_seed)
                                 : undersample(train, fold_seed, config.undersample_target);
      result.audit.resample_ids = resampled.provenance;
      std::unordered_map<std::string, std::size_t> pos;
      for (std::size_t i = 0; i < train.size(); ++i) pos[train[i].req_id] = i;
      fit_reqs = resampled.requirements;
      fit_fs.clear();
      for (const auto& id : resampled.provenance) fit_fs.push_back(train_fs[pos.at(id)]);
    }
    // Vocabulary always comes from the (unresampled) training split.
    const auto model = train_flat(fit_reqs, fit_fs, mcfg, train_fs);
    result.vocabulary_size = model.vocab.dimension();
    result.audit.vocab_ids = model.vocab.source_ids;
    result.audit.grid_ids = model.grid_provenance;
    result.chosen_c["flat"] = model.c;
    for (auto i : test_idx) {
      y_true.push_back(dataset.requirements[i].label);
      y_pred.push_back(predict_flat(model, features[i]));
    }
  }
  for (const auto& l : y_true)
    if (!train_labels.contains(l)) ++result.unseen_test;
  result.confusion = confusion_matrix(y_true, y_pred, dataset.label_set);
  return result;
}

}  // namespace detail

inline EvaluationReport run_cv(const Dataset& dataset, std::span<const FeatureSet> features, Strategy strategy,
                               const FoldPlan& plan, const ExperimentConfig& config) {
  if (features.size() != dataset.requirements.size() || plan.fold_of.size() != dataset.requirements.size())
    throw ContractError("run_cv: features and fold plan must cover the dataset row for row");
  const auto start = std::chrono::steady_clock::now();

  EvaluationReport report;
  report.strategy = strategy;
  report.labels = dataset.label_set;
  report.folds.resize(plan.k);

  std::vector<std::exception_ptr> errors(plan.k);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < plan.k; f = next++) {
      try {
        report.folds[f] = detail::run_fold(dataset, features, strategy, plan, f, config);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::clamp<std::size_t>(config.threads, 1, plan.k);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  report.pooled = ConfusionMatrix(dataset.label_set);
  for (const auto& f : report.folds) report.pooled += f.confusion;
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline EvaluationReport run_cv(const Dataset& dataset, const Annotations& annotations, Strategy strategy,
                               const FoldPlan& plan, const ExperimentConfig& config) {
  const auto features = extract_features(dataset, annotations, config.feature_mode);
  return run_cv(dataset, features, strategy, plan, config);
}

// Problems found in a fold's provenance records: any stage that consumed a
// test req_id, or a req_id outside the training split.
inline std::vector<std::string> audit_leakage(const FoldResult& fold) {
  std::vector<std::string> problems;
  const std::unordered_set<std::string> test(fold.audit.test_ids.begin(), fold.audit.test_ids.end());
  const std::unordered_set<std::string> train(fold.audit.train_ids.begin(), fold.audit.train_ids.end());
  auto check = [&](std::string_view stage, const std::vector<std::string>& ids) {
    for (const auto& id : ids) {
      if (test.contains(id)) {
        problems.push_back("fold " + std::to_string(fold.index) + ": " + std::string(stage) + " used test row " + id);
        return;
      }
      if (!train.contains(id)) {
        problems.push_back("fold " + std::to_string(fold.index) + ": " + std::string(stage) +
                           " used a row outside the training split: " + id);
        return;
      }
    }
  };
  for (const auto& id : fold.audit.train_ids)
    if (test.contains(id)) problems.push_back("fold " + std::to_string(fold.index) + ": row in both splits: " + id);
  check("vocabulary", fold.audit.vocab_ids);
  check("decomposition", fold.audit.plan_ids);
  check("resampling", fold.audit.resample_ids);
  check("grid search", fold.audit.grid_ids);
  return problems;
}

inline std::vector<std::string> audit_leakage(const EvaluationReport& report) {
  std::vector<std::string> problems;
  for (const auto& f : report.folds) {
    auto p = audit_leakage(f);
    problems.insert(problems.end(), p.begin(), p.end());
  }
  return problems;
}

}  // namespace hc4rc
