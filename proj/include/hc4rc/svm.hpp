#pragma once

// L2-regularized linear SVM with plain hinge loss and an unregularized bias:
//
//   min_{w,b}  1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))
//
// Solved in the dual,
//
//   min_a  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
//
// by SMO with second-order working-set selection (two coordinates per step,
// which keeps y'a = 0), holding w = sum_i a_i y_i x_i explicitly. An epoch is
// n pair updates. After each epoch the primal objective at the current
// (w, b) is evaluated and the best iterate so far is kept, so the recorded
// objective trajectory is non-increasing. Training stops when the duality
// gap drops below `tolerance` relative to the primal, when the KKT
// violation vanishes, or after `max_epochs`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"
#include "hc4rc/eval/folds.hpp"
#include "hc4rc/eval/metrics.hpp"
#include "hc4rc/vectorizer.hpp"

namespace hc4rc {

struct SvmConfig {
  double c = 1.0;
  double tolerance = 1e-4;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  Label positive_label = "+1";
  Label negative_label = "-1";
  SvmConfig config;

  bool single_class = false;  // trained on one class only: constant sign predictor
  double objective = 0.0;     // primal objective of the returned (w, b)
  double dual_objective = 0.0;
  std::vector<double> objective_history;  // best primal objective after each epoch
  std::vector<double> dual_history;       // dual objective (maximization form) after each epoch
  std::size_t epochs = 0;

  std::size_t dimension() const noexcept { return weights.size(); }

  double decision(const SparseVector& x) const {
    if (x.dimension != weights.size())
      throw ContractError("DimensionMismatch: vector of dimension " + std::to_string(x.dimension) +
                          " for a model of dimension " + std::to_string(weights.size()));
    return x.dot(weights) + bias;
  }
};

inline double primal_objective(std::span<const SparseVector> X, std::span<const int> y, std::span<const double> w,
                               double b, double c) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) loss += std::max(0.0, 1.0 - y[i] * (X[i].dot(w) + b));
  return 0.5 * reg + c * loss;
}

namespace detail {

inline void check_training_input(std::span<const SparseVector> X, std::size_t n_targets) {
  if (X.empty()) throw ContractError("train: empty training set");
  if (X.size() != n_targets)
    throw ContractError("DimensionMismatch: " + std::to_string(X.size()) + " rows but " + std::to_string(n_targets) +
                        " targets");
  const auto d = X.front().dimension;
  for (const auto& x : X) {
    if (x.dimension != d) throw ContractError("DimensionMismatch: rows of differing dimension");
    for (const auto& e : x.entries) {
      if (!std::isfinite(e.weight)) throw ContractError("NonFiniteInput: non-finite feature weight");
      if (e.column >= d) throw ContractError("DimensionMismatch: column outside the vector dimension");
    }
  }
}

class SmoSolver {
 public:
  SmoSolver(std::span<const SparseVector> X, std::span<const int> y, const SvmConfig& cfg)
      : X_(X), y_(y), cfg_(cfg), n_(X.size()), d_(X.front().dimension), alpha_(n_, 0.0), grad_(n_, -1.0),
        w_(d_, 0.0), qd_(n_), scratch_(d_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) qd_[i] = X_[i].squared_norm();
    // Cache Q rows when the full matrix is modest; otherwise recompute on demand.
    if (n_ <= kMaxCachedRows) cache_.resize(n_);
  }

  LinearModel run() {
    LinearModel best;
    best.config = cfg_;
    best.weights = w_;
    best.bias = compute_bias();
    best.objective = primal_objective(X_, y_, best.weights, best.bias, cfg_.c);

    bool optimal = false;
    for (std::size_t epoch = 0; epoch < cfg_.max_epochs && !optimal; ++epoch) {
      for (std::size_t step = 0; step < n_; ++step) {
        if (!take_step()) {
          optimal = true;
          break;
        }
      }
      const double b = compute_bias();
      const double primal = primal_objective(X_, y_, w_, b, cfg_.c);
      const double dual = dual_objective();
      if (primal < best.objective) {
        best.weights = w_;
        best.bias = b;
        best.objective = primal;
      }
      best.objective_history.push_back(best.objective);
      best.dual_history.push_back(dual);
      best.dual_objective = dual;
      best.epochs = epoch + 1;
      if (best.objective - dual <= cfg_.tolerance * std::max(1.0, std::abs(best.objective))) break;
    }
    return best;
  }

 private:
  static constexpr std::size_t kMaxCachedRows = 6000;
  static constexpr double kTau = 1e-12;
  static constexpr double kKktEps = 1e-12;

  bool upper(std::size_t i) const { return alpha_[i] >= cfg_.c; }
  bool lower(std::size_t i) const { return alpha_[i] <= 0.0; }

  const std::vector<double>& q_row(std::size_t i) {
    if (!cache_.empty() && !cache_[i].empty()) return cache_[i];
    std::vector<double> row(n_);
    for (const auto& e : X_[i].entries) scratch_[e.column] = e.weight;
    for (std::size_t t = 0; t < n_; ++t) row[t] = y_[i] * y_[t] * X_[t].dot(scratch_);
    for (const auto& e : X_[i].entries) scratch_[e.column] = 0.0;
    if (cache_.empty()) {
      uncached_ = std::move(row);
      return uncached_;
    }
    cache_[i] = std::move(row);
    return cache_[i];
  }

  // One SMO pair update; false once the maximal KKT violation is below kKktEps.
  bool take_step() {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == 1) {
        if (!upper(t) && -grad_[t] >= gmax) gmax = -grad_[t], i = t;
      } else {
        if (!lower(t) && grad_[t] >= gmax) gmax = grad_[t], i = t;
      }
    }
    if (i == n_) return false;
    const std::vector<double> qi = q_row(i);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_drop = std::numeric_limits<double>::infinity();
    std::size_t j = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (diff > 0) {
          double quad = qd_[i] + qd_[t] - 2.0 * y_[i] * qi[t];
          if (quad <= 0) quad = kTau;
          const double drop = -(diff * diff) / quad;
          if (drop <= best_drop) best_drop = drop, j = t;
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (diff > 0) {
          double quad = qd_[i] + qd_[t] + 2.0 * y_[i] * qi[t];
          if (quad <= 0) quad = kTau;
          const double drop = -(diff * diff) / quad;
          if (drop <= best_drop) best_drop = drop, j = t;
        }
      }
    }
    if (gmax + gmax2 < kKktEps || j == n_) return false;
    const std::vector<double>& qj = q_row(j);

    const double c = cfg_.c;
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      double quad = qd_[i] + qd_[j] + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) aj = 0, ai = diff;
      } else {
        if (ai < 0) ai = 0, aj = -diff;
      }
      if (diff > 0) {
        if (ai > c) ai = c, aj = c - diff;
      } else {
        if (aj > c) aj = c, ai = c + diff;
      }
    } else {
      double quad = qd_[i] + qd_[j] - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) ai = c, aj = sum - c;
      } else {
        if (aj < 0) aj = 0, ai = sum;
      }
      if (sum > c) {
        if (aj > c) aj = c, ai = sum - c;
      } else {
        if (ai < 0) ai = 0, aj = sum;
      }
    }

    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) grad_[t] += qi[t] * di + qj[t] * dj;
    for (const auto& e : X_[i].entries) w_[e.column] += di * y_[i] * e.weight;
    for (const auto& e : X_[j].entries) w_[e.column] += dj * y_[j] * e.weight;
    return true;
  }

  // b = -rho: mean of y_i G_i over free variables, else the midpoint of the
  // feasible interval implied by the bounded ones.
  double compute_bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double yg = y_[i] * grad_[i];
      if (upper(i)) {
        if (y_[i] == -1) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (lower(i)) {
        if (y_[i] == 1) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return -rho;
  }

  // Maximization form: sum a_i - 1/2 |w|^2. Never exceeds the primal.
  double dual_objective() const {
    double sum = 0.0;
    for (double a : alpha_) sum += a;
    double w2 = 0.0;
    for (double v : w_) w2 += v * v;
    return sum - 0.5 * w2;
  }

  std::span<const SparseVector> X_;
  std::span<const int> y_;
  SvmConfig cfg_;
  std::size_t n_;
  std::size_t d_;
  std::vector<double> alpha_;
  std::vector<double> grad_;  // Q a - e
  std::vector<double> w_;
  std::vector<double> qd_;
  std::vector<double> scratch_;
  std::vector<std::vector<double>> cache_;
  std::vector<double> uncached_;
};

}  // namespace detail

// y_i in {-1, +1}. Input containing only one class yields a constant-sign
// model with `single_class` set.
inline LinearModel train_binary(std::span<const SparseVector> X, std::span<const int> y, const SvmConfig& config = {}) {
  detail::check_training_input(X, y.size());
  if (!(config.c > 0.0) || !std::isfinite(config.c)) throw ContractError("train: C must be a positive finite number");
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y) {
    if (v != 1 && v != -1) throw ContractError("train: binary targets must be +1 or -1");
    (v == 1 ? has_pos : has_neg) = true;
  }
  if (!(has_pos && has_neg)) {
    LinearModel m;
    m.config = config;
    m.weights.assign(X.front().dimension, 0.0);
    m.bias = has_pos ? 1.0 : -1.0;
    m.single_class = true;
    m.objective = 0.0;  // |w| = 0 and every margin is exactly 1
    return m;
  }
  return detail::SmoSolver(X, y, config).run();
}

struct MulticlassModel {
  std::vector<Label> class_labels;            // sorted
  std::vector<LinearModel> per_class_models;  // one-vs-rest, aligned with class_labels

  std::size_t dimension() const { return per_class_models.empty() ? 0 : per_class_models.front().dimension(); }
};

struct Prediction {
  Label label;
  std::vector<std::pair<Label, double>> scores;  // in class_labels order
};

inline MulticlassModel train_multiclass(std::span<const SparseVector> X, std::span<const Label> y,
                                        const SvmConfig& config = {}) {
  detail::check_training_input(X, y.size());
  const std::set<Label> distinct(y.begin(), y.end());
  MulticlassModel model;
  model.class_labels.assign(distinct.begin(), distinct.end());
  std::vector<int> targets(y.size());
  for (std::size_t c = 0; c < model.class_labels.size(); ++c) {
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = y[i] == model.class_labels[c] ? 1 : -1;
    SvmConfig per_class = config;
    per_class.seed = derive_seed(config.seed, c);
    auto m = train_binary(X, targets, per_class);
    m.positive_label = model.class_labels[c];
    m.negative_label = "rest";
    model.per_class_models.push_back(std::move(m));
  }
  return model;
}

// Argmax of per-class decision values; ties go to the earliest label.
inline Prediction predict(const MulticlassModel& model, const SparseVector& x) {
  if (model.class_labels.empty()) throw ContractError("predict: model has no classes");
  Prediction p;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.class_labels.size(); ++c) {
    const double s = model.per_class_models[c].decision(x);
    p.scores.emplace_back(model.class_labels[c], s);
    if (s > best || p.label.empty()) {
      best = s;
      p.label = model.class_labels[c];
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Grid search

struct GridSearchResult {
  double best_c = 1.0;
  std::vector<std::pair<double, double>> scores;  // (C, mean inner macro-F1), ascending C
  std::vector<std::string> provenance;            // ids of the rows the search saw
  std::size_t inner_folds = 0;                    // 0 = search skipped (too few rows)
};

// Trains on (X, y) and predicts labels for the held-out rows.
struct MulticlassFitter {
  std::vector<Label> operator()(std::span<const SparseVector> X, std::span<const Label> y,
                                std::span<const SparseVector> test, const SvmConfig& cfg) const {
    const auto model = train_multiclass(X, y, cfg);
    std::vector<Label> out;
    for (const auto& x : test) out.push_back(predict(model, x).label);
    return out;
  }
};

// Picks C by stratified inner cross-validation on the given rows, scoring
// each split by macro-F1 and averaging. Ties go to the smallest C.
template <typename Fitter = MulticlassFitter>
GridSearchResult grid_search(std::span<const SparseVector> X, std::span<const Label> y, std::vector<double> grid,
                             std::size_t inner_folds, const SvmConfig& base, std::span<const std::string> ids = {},
                             Fitter fit = {}) {
  if (grid.empty()) throw ContractError("grid_search: empty parameter grid");
  if (X.size() != y.size()) throw ContractError("grid_search: X and y differ in length");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  GridSearchResult result;
  result.provenance.assign(ids.begin(), ids.end());
  result.best_c = grid.front();
  const std::set<Label> distinct(y.begin(), y.end());
  const std::size_t folds = std::min(inner_folds, X.size());
  if (grid.size() == 1 || folds < 2 || distinct.size() < 2) return result;
  result.inner_folds = folds;

  const std::vector<Label> labels(distinct.begin(), distinct.end());
  const auto plan = plan_stratified_kfold(y, folds, base.seed);
  double best_score = -1.0;
  for (double c : grid) {
    SvmConfig cfg = base;
    cfg.c = c;
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<SparseVector> train_x, test_x;
      std::vector<Label> train_y, test_y;
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (plan.fold_of[i] == f) {
          test_x.push_back(X[i]);
          test_y.push_back(y[i]);
        } else {
          train_x.push_back(X[i]);
          train_y.push_back(y[i]);
        }
      }
      const auto pred = fit(train_x, train_y, test_x, cfg);
      total += macro_metrics(per_class_prf(confusion_matrix(test_y, pred, labels))).f1;
    }
    const double mean = total / static_cast<double>(folds);
    result.scores.emplace_back(c, mean);
    if (mean > best_score) {
      best_score = mean;
      result.best_c = c;
    }
  }
  return result;
}

}  // namespace hc4rc
