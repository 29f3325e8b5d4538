#pragma once

// Synthetic annotated corpora: each requirement is one parsed sentence
// "The system shall <verb> the <noun> <adverb>" whose verb and noun come from
// a per-class pool, so every class is linearly separable in feature space.
// With `noise` > 0 a share of rows draw their words from another class.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hc4rc/conllu.hpp"
#include "hc4rc/corpus.hpp"
#include "hc4rc/rng.hpp"

namespace synth {

struct Corpus {
  hc4rc::Dataset dataset;
  hc4rc::Annotations annotations;
};

inline std::string word(const std::string& stem, std::size_t i) { return stem + "w" + std::to_string(i); }

inline hc4rc::AnnotatedSentence sentence(const std::string& id, const std::string& verb, const std::string& noun,
                                         const std::string& adverb) {
  hc4rc::AnnotatedSentence s;
  s.req_id = id;
  s.tokens = {{1, "The", "the", "DET", 2, "det", {}},
              {2, "system", "system", "NOUN", 4, "nsubj", {}},
              {3, "shall", "shall", "AUX", 4, "aux", {}},
              {4, verb, verb, "VERB", 0, "root", {}},
              {5, "the", "the", "DET", 6, "det", {}},
              {6, noun, noun, "NOUN", 4, "dobj", {}},
              {7, adverb, adverb, "ADV", 4, "advmod", {}},
              {8, ".", ".", "PUNCT", 4, "punct", {}}};
  return s;
}

// `counts` gives rows per class; rows are spread over `projects` projects
// round-robin. Labels must be upper-case letters only.
inline Corpus make(const std::map<std::string, std::size_t>& counts, std::size_t projects, std::uint64_t seed,
                   double noise = 0.0) {
  Corpus c;
  hc4rc::Rng rng(seed);
  std::vector<std::string> labels;
  for (const auto& [l, n] : counts) labels.push_back(l);
  std::size_t row = 0;
  std::vector<hc4rc::Requirement> reqs;
  for (const auto& [label, n] : counts)
    for (std::size_t i = 0; i < n; ++i) reqs.push_back({"", "", "", label});
  std::vector<hc4rc::Requirement> shuffled = reqs;
  rng.shuffle(std::span<hc4rc::Requirement>(shuffled));
  for (auto& r : shuffled) {
    ++row;
    r.project_id = "PRJ" + std::to_string(row % projects);
    r.req_id = r.project_id + "-" + std::to_string(row);
    std::string stem = hc4rc::text::to_lower(r.label);
    if (noise > 0.0 && static_cast<double>(rng.below(1000)) < noise * 1000.0) stem = hc4rc::text::to_lower(labels[rng.below(labels.size())]);
    const auto verb = "do" + word(stem, rng.below(4));
    const auto noun = "obj" + word(stem, rng.below(4));
    const auto adverb = "how" + std::to_string(rng.below(50));
    r.text = "The system shall " + verb + " the " + noun + " " + adverb + ".";
    c.annotations[r.req_id].push_back(sentence(r.req_id, verb, noun, adverb));
    c.dataset.requirements.push_back(r);
  }
  std::set<std::string> ls, ps;
  for (const auto& r : c.dataset.requirements) {
    ls.insert(r.label);
    ps.insert(r.project_id);
  }
  c.dataset.label_set.assign(ls.begin(), ls.end());
  c.dataset.project_set.assign(ps.begin(), ps.end());
  return c;
}

inline void write(const Corpus& c, const std::string& csv_path, const std::string& conllu_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  csv << "ProjectID,RequirementText,Class\n";
  for (const auto& r : c.dataset.requirements) csv << r.project_id << ",\"" << r.text << "\"," << r.label << "\n";
  std::ofstream conllu(conllu_path, std::ios::binary);
  for (const auto& r : c.dataset.requirements) conllu << hc4rc::to_conllu(c.annotations.at(r.req_id));
}

}  // namespace synth
