#pragma once

// Vocabulary over training-fold feature sets and L2-normalized sparse
// TF-IDF rows. Columns follow lexicographic term order so a vocabulary built
// from the same documents always yields the same matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hc4rc/errors.hpp"
#include "hc4rc/sr4fs.hpp"

namespace hc4rc {

struct SparseEntry {
  std::size_t column = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

struct SparseVector {
  std::vector<SparseEntry> entries;  // strictly increasing columns
  std::size_t dimension = 0;

  double dot(std::span<const double> dense) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * dense[e.column];
    return s;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * e.weight;
    return s;
  }

  static SparseVector from_dense(std::span<const double> values) {
    SparseVector v{{}, values.size()};
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] != 0.0) v.entries.push_back({i, values[i]});
    return v;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->column < j->column) {
      ++i;
    } else if (j->column < i->column) {
      ++j;
    } else {
      s += i->weight * j->weight;
      ++i;
      ++j;
    }
  }
  return s;
}

struct Vocabulary {
  std::vector<std::string> terms;  // sorted
  std::unordered_map<std::string, std::size_t> term_index;
  std::vector<std::size_t> document_frequency;  // aligned with terms
  std::size_t corpus_size = 0;
  std::vector<std::string> source_ids;  // req_ids of the documents it was built from

  std::size_t dimension() const noexcept { return terms.size(); }

  double idf(std::size_t column) const {
    return std::log((1.0 + static_cast<double>(corpus_size)) / (1.0 + static_cast<double>(document_frequency[column]))) +
           1.0;
  }
};

enum class Weighting { TfIdf, RawTf };

// Throws DegenerateError("EmptyVocabulary") when no term reaches min_df.
inline Vocabulary build_vocabulary(std::span<const FeatureSet> featuresets, std::size_t min_df = 1) {
  std::map<std::string, std::size_t> df;
  for (const auto& fs : featuresets) {
    auto unique = fs.features;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto& t : unique) ++df[t];
  }
  Vocabulary v;
  v.corpus_size = featuresets.size();
  for (const auto& fs : featuresets) v.source_ids.push_back(fs.req_id);
  for (auto& [term, count] : df) {
    if (count < std::max<std::size_t>(min_df, 1)) continue;
    v.term_index.emplace(term, v.terms.size());
    v.terms.push_back(term);
    v.document_frequency.push_back(count);
  }
  if (v.terms.empty()) throw DegenerateError("EmptyVocabulary: no term has document frequency >= " + std::to_string(min_df));
  return v;
}

// tf x idf with idf = ln((1+N)/(1+df)) + 1, then L2 row normalization.
// Out-of-vocabulary terms are dropped; an all-OOV set stays the zero vector.
inline SparseVector vectorize(const FeatureSet& featureset, const Vocabulary& vocab,
                              Weighting weighting = Weighting::TfIdf) {
  std::map<std::size_t, double> tf;
  for (const auto& term : featureset.features)
    if (auto it = vocab.term_index.find(term); it != vocab.term_index.end()) tf[it->second] += 1.0;

  SparseVector v{{}, vocab.dimension()};
  double norm2 = 0.0;
  for (auto [column, count] : tf) {
    const double w = weighting == Weighting::TfIdf ? count * vocab.idf(column) : count;
    v.entries.push_back({column, w});
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : v.entries) e.weight *= inv;
  }
  return v;
}

inline std::vector<SparseVector> vectorize_all(std::span<const FeatureSet> featuresets, const Vocabulary& vocab,
                                               Weighting weighting = Weighting::TfIdf) {
  std::vector<SparseVector> rows;
  rows.reserve(featuresets.size());
  for (const auto& fs : featuresets) rows.push_back(vectorize(fs, vocab, weighting));
  return rows;
}

}  // namespace hc4rc
