#pragma once

// Confusion matrices and the macro/micro metric family.
//
//   macro-P  = mean_k P_k          macro-R = mean_k R_k
//   macro-F1 = 2 PR / (P + R) over the two macro averages (harmonic mean)
//   micro-P  = micro-R = micro-F1 = sum_k TP_k / grand total  (accuracy)
//
// Every ratio with a zero denominator is defined as 0.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"

namespace hc4rc {

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<Label> labels)
      : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  // rows = true class, columns = predicted class
  std::size_t at(std::size_t true_idx, std::size_t pred_idx) const { return counts_[true_idx * size() + pred_idx]; }
  std::size_t& at(std::size_t true_idx, std::size_t pred_idx) { return counts_[true_idx * size() + pred_idx]; }

  std::size_t index_of(const Label& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return i;
    throw ContractError("UnknownLabel: " + label);
  }

  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  std::size_t diagonal() const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < size(); ++k) s += at(k, k);
    return s;
  }

  std::size_t row_sum(std::size_t k) const {
    std::size_t s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += at(k, j);
    return s;
  }

  std::size_t column_sum(std::size_t k) const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += at(i, k);
    return s;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
    if (other.labels_ != labels_) throw ContractError("LabelMismatch: confusion matrices over different label lists");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

  // CSV with a header row of predicted labels and one row per true label.
  std::string to_csv() const {
    std::string out = "true\\predicted";
    for (const auto& l : labels_) out += "," + l;
    out += "\n";
    for (std::size_t i = 0; i < size(); ++i) {
      out += labels_[i];
      for (std::size_t j = 0; j < size(); ++j) out += "," + std::to_string(at(i, j));
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<Label> labels_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const Label> y_true, std::span<const Label> y_pred,
                                        std::vector<Label> labels) {
  if (y_true.size() != y_pred.size())
    throw ContractError("LengthMismatch: " + std::to_string(y_true.size()) + " true vs " +
                        std::to_string(y_pred.size()) + " predicted labels");
  ConfusionMatrix cm(std::move(labels));
  for (std::size_t t = 0; t < y_true.size(); ++t) ++cm.at(cm.index_of(y_true[t]), cm.index_of(y_pred[t]));
  return cm;
}

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

inline double harmonic_f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

struct PerClassMetrics {
  std::vector<Label> labels;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::size_t> support;  // true instances per class
};

inline PerClassMetrics per_class_prf(const ConfusionMatrix& cm) {
  PerClassMetrics m;
  m.labels = cm.labels();
  for (std::size_t k = 0; k < cm.size(); ++k) {
    const auto tp = static_cast<double>(cm.at(k, k));
    const double p = safe_ratio(tp, static_cast<double>(cm.column_sum(k)));
    const double r = safe_ratio(tp, static_cast<double>(cm.row_sum(k)));
    m.precision.push_back(p);
    m.recall.push_back(r);
    m.f1.push_back(harmonic_f1(p, r));
    m.support.push_back(cm.row_sum(k));
  }
  return m;
}

struct MacroMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;          // harmonic mean of the two macro averages
  double mean_class_f1 = 0.0;  // arithmetic mean of per-class F1, reported alongside
};

inline MacroMetrics macro_metrics(const PerClassMetrics& pcm) {
  MacroMetrics m;
  const auto k = static_cast<double>(pcm.labels.size());
  if (k == 0) return m;
  for (std::size_t i = 0; i < pcm.labels.size(); ++i) {
    m.precision += pcm.precision[i];
    m.recall += pcm.recall[i];
    m.mean_class_f1 += pcm.f1[i];
  }
  m.precision /= k;
  m.recall /= k;
  m.mean_class_f1 /= k;
  m.f1 = harmonic_f1(m.precision, m.recall);
  return m;
}

// Accuracy; identical to micro P, R and F1 for single-label classification.
inline double micro_metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw ContractError("EmptyMatrix: micro average of a matrix with no instances");
  return static_cast<double>(cm.diagonal()) / static_cast<double>(total);
}

// Support-weighted mean of per-class F1. Not a headline number; kept for
// comparison with work that reports it.
inline double weighted_f1(const PerClassMetrics& pcm) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pcm.labels.size(); ++i) {
    num += pcm.f1[i] * static_cast<double>(pcm.support[i]);
    den += static_cast<double>(pcm.support[i]);
  }
  return safe_ratio(num, den);
}

}  // namespace hc4rc
