#pragma once

// Labeled requirement datasets and their linguistic annotations.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hc4rc/stopwords.hpp"

namespace hc4rc {

using Label = std::string;

struct Requirement {
  std::string req_id;
  std::string project_id;
  std::string text;
  Label label;
};

struct Dataset {
  std::vector<Requirement> requirements;
  std::vector<Label> label_set;          // sorted
  std::vector<std::string> project_set;  // sorted

  std::size_t sample_size() const noexcept { return requirements.size(); }

  std::map<Label, std::size_t> class_counts() const {
    std::map<Label, std::size_t> counts;
    for (const auto& label : label_set) counts[label] = 0;
    for (const auto& r : requirements) ++counts[r.label];
    return counts;
  }
};

// Counts over an arbitrary slice (e.g. a training fold).
inline std::map<Label, std::size_t> class_counts(std::span<const Requirement> requirements) {
  std::map<Label, std::size_t> counts;
  for (const auto& r : requirements) ++counts[r.label];
  return counts;
}

// Entity labels that carry meaning downstream; other NER labels are dropped at load.
inline bool is_measure_entity(std::string_view label) {
  static const std::set<std::string_view> kLabels{"DATE", "TIME", "PERCENT", "MONEY", "CARDINAL", "QUANTITY"};
  return kLabels.contains(label);
}

struct EntityTag {
  bool begin = true;  // B- vs I-
  std::string label;  // DATE, TIME, PERCENT, MONEY, CARDINAL, QUANTITY
};

struct AnnotatedToken {
  std::size_t index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::size_t head = 0;  // 0 = root
  std::string deprel;    // lowercased
  std::optional<EntityTag> entity;
};

struct AnnotatedSentence {
  std::string req_id;
  std::vector<AnnotatedToken> tokens;

  const AnnotatedToken& token(std::size_t index) const { return tokens.at(index - 1); }
  std::size_t size() const noexcept { return tokens.size(); }
};

// req_id -> sentences in file order.
using Annotations = std::map<std::string, std::vector<AnnotatedSentence>>;

namespace text {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

// Length in code points; continuation bytes of multi-byte UTF-8 are not counted.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

inline bool is_punctuation_only(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s)
    if (!std::ispunct(c)) return false;
  return true;
}

}  // namespace text

// Minimum kept lemma length, in characters.
inline constexpr std::size_t kMinTermLength = 3;

// True when a lowercased lemma survives the stopword, short-word and
// punctuation filters.
inline bool keeps_term(std::string_view lowered, const WordSet& stopwords) {
  if (text::is_punctuation_only(lowered)) return false;
  if (text::utf8_length(lowered) < kMinTermLength) return false;
  return !stopwords.contains(std::string(lowered));
}

// Lowercased lemmas in token order, minus stopwords, short words and
// punctuation. Tokenization and lemmatization come from the annotation.
inline std::vector<std::string> preprocess(std::span<const AnnotatedToken> tokens,
                                           const WordSet& stopwords = default_stopwords()) {
  std::vector<std::string> out;
  for (const auto& tok : tokens) {
    if (tok.upos == "PUNCT") continue;
    auto lemma = text::to_lower(tok.lemma);
    if (keeps_term(lemma, stopwords)) out.push_back(std::move(lemma));
  }
  return out;
}

}  // namespace hc4rc
