#pragma once

// Experiment reports: a versioned JSON document (report.json), a fixed-width
// text table (report.txt) and per-fold confusion matrices.
//
// report.json carries no timestamps or timings, so two runs with the same
// inputs and seed produce identical bytes.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hc4rc/corpus.hpp"
#include "hc4rc/eval/folds.hpp"
#include "hc4rc/eval/metrics.hpp"
#include "hc4rc/eval/runner.hpp"

namespace hc4rc {

inline constexpr const char* kReportSchema = "hc4rc-report/1";

struct ExperimentInfo {
  std::string dataset_path;
  std::string annotations_path;
  std::string fold_name;  // "ten" or "project"
  std::vector<std::string> warnings;
};

namespace report_detail {

using nlohmann::json;

inline json metrics_json(const MetricSummary& s) {
  json per_class = json::object();
  for (std::size_t i = 0; i < s.per_class.labels.size(); ++i)
    per_class[s.per_class.labels[i]] = {{"precision", s.per_class.precision[i]},
                                        {"recall", s.per_class.recall[i]},
                                        {"f1", s.per_class.f1[i]},
                                        {"support", s.per_class.support[i]}};
  return {{"per_class", per_class},
          {"macro",
           {{"precision", s.macro.precision},
            {"recall", s.macro.recall},
            {"f1", s.macro.f1},
            {"mean_class_f1", s.macro.mean_class_f1}}},
          {"micro", s.micro},
          {"weighted_f1", s.weighted_f1}};
}

inline json confusion_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (std::size_t i = 0; i < cm.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cm.size(); ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  return {{"labels", cm.labels()}, {"counts", rows}};
}

inline json plan_json(const DecompositionPlan& p) {
  return {{"maj_classes", p.maj_classes},
          {"min_classes", p.min_classes},
          {"maj_count", p.maj_count},
          {"min_count", p.min_count},
          {"total", p.total}};
}

inline std::string weighting_name(Weighting w) { return w == Weighting::TfIdf ? "tfidf" : "tf"; }

}  // namespace report_detail

inline nlohmann::json config_json(const ExperimentConfig& c) {
  return {{"seed", c.seed},
          {"feature_mode", c.feature_mode == FeatureMode::Plain ? "plain" : "role-prefixed"},
          {"global_decomposition", c.global_decomposition},
          {"undersample_target", std::string(undersample_target_name(c.undersample_target))},
          {"svm",
           {{"c", c.model.svm.c}, {"tolerance", c.model.svm.tolerance}, {"max_epochs", c.model.svm.max_epochs}}},
          {"grid_search", c.model.grid_search},
          {"grid", c.model.grid},
          {"inner_folds", c.model.inner_folds},
          {"min_df", c.model.min_df},
          {"weighting", report_detail::weighting_name(c.model.weighting)}};
}

inline nlohmann::json strategy_json(const EvaluationReport& r) {
  using report_detail::json;
  json folds = json::array();
  double n_train = 0, dim = 0;
  for (const auto& f : r.folds) {
    json jf{{"index", f.index},
            {"n_train", f.n_train},
            {"n_test", f.n_test},
            {"vocabulary_size", f.vocabulary_size},
            {"unseen_test", f.unseen_test},
            {"chosen_c", f.chosen_c},
            {"warnings", f.warnings},
            {"confusion", report_detail::confusion_json(f.confusion)},
            {"metrics", report_detail::metrics_json(summarize(f.confusion))}};
    if (f.plan) jf["plan"] = report_detail::plan_json(*f.plan);
    folds.push_back(jf);
    n_train += static_cast<double>(f.n_train);
    dim += static_cast<double>(f.vocabulary_size);
  }
  double micro_mean = 0.0;
  const auto mean = r.mean_over_folds(&micro_mean);
  const auto k = static_cast<double>(std::max<std::size_t>(r.folds.size(), 1));
  return {{"folds", folds},
          {"pooled",
           {{"confusion", report_detail::confusion_json(r.pooled)},
            {"metrics", report_detail::metrics_json(r.pooled_metrics())}}},
          {"mean_over_folds",
           {{"precision", mean.precision},
            {"recall", mean.recall},
            {"f1", mean.f1},
            {"mean_class_f1", mean.mean_class_f1},
            {"micro", micro_mean}}},
          {"hdlss", {{"mean_train_rows", n_train / k}, {"mean_dimension", dim / k}}},
          {"leakage_violations", audit_leakage(r)}};
}

inline nlohmann::json report_json(const Dataset& dataset, const FoldPlan& plan, const ExperimentConfig& config,
                                  const ExperimentInfo& info, const std::vector<EvaluationReport>& results) {
  using report_detail::json;
  json counts = json::object();
  for (const auto& [label, n] : dataset.class_counts()) counts[label] = n;
  json strategies = json::object();
  for (const auto& r : results) strategies[std::string(strategy_name(r.strategy))] = strategy_json(r);
  return {{"schema", kReportSchema},
          {"config", config_json(config)},
          {"inputs", {{"dataset", info.dataset_path}, {"annotations", info.annotations_path}}},
          {"dataset",
           {{"rows", dataset.sample_size()},
            {"projects", dataset.project_set.size()},
            {"labels", dataset.label_set},
            {"class_counts", counts}}},
          {"fold_plan",
           {{"name", info.fold_name},
            {"kind", std::string(fold_kind_name(plan.kind))},
            {"k", plan.k},
            {"seed", plan.seed},
            {"fold_sizes", plan.fold_sizes()}}},
          {"warnings", info.warnings},
          {"strategies", strategies}};
}

namespace report_detail {

inline std::string fmt(const char* f, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace report_detail

// One row per class (with its count in the dataset), P/R/F1 per strategy from
// the pooled confusion matrix, then macro and micro rows.
inline std::string report_text(const Dataset& dataset, const std::vector<EvaluationReport>& results,
                               bool with_timing = true) {
  using report_detail::fmt;
  using report_detail::pad;
  using report_detail::pad_right;
  constexpr std::size_t kLabelWidth = 12, kCell = 7;
  std::string out;

  std::string head = pad_right("", kLabelWidth), sub = pad_right("class (n)", kLabelWidth);
  for (const auto& r : results) {
    head += " | " + pad_right(std::string(strategy_name(r.strategy)), 3 * kCell);
    sub += " | " + pad("P", kCell) + pad("R", kCell) + pad("F1", kCell);
  }
  out += head + "\n" + sub + "\n" + std::string(sub.size(), '-') + "\n";

  std::vector<MetricSummary> sums;
  for (const auto& r : results) sums.push_back(r.pooled_metrics());
  const auto counts = dataset.class_counts();
  for (std::size_t i = 0; i < dataset.label_set.size(); ++i) {
    const auto& label = dataset.label_set[i];
    std::string row = pad_right(label + " (" + std::to_string(counts.at(label)) + ")", kLabelWidth);
    for (const auto& s : sums)
      row += " | " + pad(fmt("%.2f", s.per_class.precision[i]), kCell) + pad(fmt("%.2f", s.per_class.recall[i]), kCell) +
             pad(fmt("%.2f", s.per_class.f1[i]), kCell);
    out += row + "\n";
  }
  out += std::string(sub.size(), '-') + "\n";

  std::string macro = pad_right("macro", kLabelWidth), micro = pad_right("micro", kLabelWidth),
              mean_f1 = pad_right("mean cls F1", kLabelWidth), folds = pad_right("fold mean", kLabelWidth);
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& s = sums[r];
    macro += " | " + pad(fmt("%.2f", s.macro.precision), kCell) + pad(fmt("%.2f", s.macro.recall), kCell) +
             pad(fmt("%.2f", s.macro.f1), kCell);
    micro += " | " + pad(fmt("%.2f", s.micro), kCell) + pad(fmt("%.2f", s.micro), kCell) + pad(fmt("%.2f", s.micro), kCell);
    mean_f1 += " | " + pad("", 2 * kCell) + pad(fmt("%.2f", s.macro.mean_class_f1), kCell);
    const auto m = results[r].mean_over_folds();
    folds += " | " + pad(fmt("%.2f", m.precision), kCell) + pad(fmt("%.2f", m.recall), kCell) +
             pad(fmt("%.2f", m.f1), kCell);
  }
  out += macro + "\n" + micro + "\n" + mean_f1 + "\n" + folds + "\n\n";

  for (const auto& r : results) {
    std::size_t unseen = 0;
    for (const auto& f : r.folds) unseen += f.unseen_test;
    const auto leaks = audit_leakage(r);
    out += std::string(strategy_name(r.strategy)) + ": " + std::to_string(r.folds.size()) + " folds";
    if (unseen) out += ", " + std::to_string(unseen) + " test rows of classes unseen in training";
    out += leaks.empty() ? ", leakage audit clean" : ", leakage audit: " + std::to_string(leaks.size()) + " problem(s)";
    if (with_timing) out += ", " + fmt("%.2f", r.elapsed_seconds) + " s";
    out += "\n";
  }
  return out;
}

}  // namespace hc4rc
