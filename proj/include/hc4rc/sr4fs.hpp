#pragma once

// Semantic-role feature selection. Dependency-annotated tokens are mapped
// onto six roles (agent, action, theme, goal, manner, measure) by fixed
// grammatical rules; only role-bearing lemmas become classifier features.
//
// Rule precedence, first match per token wins:
//   Measure > Agent > Action > Theme > Goal > Manner
//
// Accepts both UD labels (obj, obl, case, compound:prt) and the ClearNLP
// labels spaCy emits for English (dobj, pobj, prep, prt, dative).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>  // nlohmann/json (vendor/)

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"

namespace hc4rc {

enum class SemanticRole : std::uint8_t { Agent, Action, Theme, Goal, Manner, Measure };

inline constexpr std::array<SemanticRole, 6> kAllRoles{SemanticRole::Agent, SemanticRole::Action, SemanticRole::Theme,
                                                       SemanticRole::Goal,  SemanticRole::Manner, SemanticRole::Measure};

inline constexpr std::string_view role_name(SemanticRole role) {
  switch (role) {
    case SemanticRole::Agent: return "agent";
    case SemanticRole::Action: return "action";
    case SemanticRole::Theme: return "theme";
    case SemanticRole::Goal: return "goal";
    case SemanticRole::Manner: return "manner";
    case SemanticRole::Measure: return "measure";
  }
  return "?";
}

struct RoleConfig {
  std::set<std::string> dative_prepositions{"to", "for"};
  std::set<std::string> manner_prepositions{"from", "with", "without", "after"};
};

struct RoleEntry {
  std::size_t sentence = 0;  // 0-based position among the requirement's sentences
  std::size_t token = 0;     // 1-based token index
  SemanticRole role{};

  friend bool operator==(const RoleEntry&, const RoleEntry&) = default;
};

struct RoleAssignment {
  std::string req_id;
  std::vector<RoleEntry> assignments;  // ordered by (sentence, token)

  std::optional<SemanticRole> role_of(std::size_t sentence, std::size_t token) const {
    for (const auto& e : assignments)
      if (e.sentence == sentence && e.token == token) return e.role;
    return std::nullopt;
  }
};

enum class FeatureMode { Plain, RolePrefixed };

struct FeatureSet {
  std::string req_id;
  std::vector<std::string> features;  // multiset, in token order
};

namespace detail {

inline bool is_verb(const AnnotatedToken& t) { return t.upos == "VERB" || t.upos == "AUX"; }

class RuleContext {
 public:
  explicit RuleContext(const AnnotatedSentence& s) : sentence_(s), children_(s.size() + 1) {
    for (const auto& t : s.tokens) children_[t.head].push_back(t.index);
  }

  const AnnotatedToken& tok(std::size_t i) const { return sentence_.tokens[i - 1]; }
  const AnnotatedToken* head_of(const AnnotatedToken& t) const { return t.head == 0 ? nullptr : &tok(t.head); }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_[i]; }

  // The token and all its transitive dependents.
  void mark_subtree(std::size_t root, std::vector<bool>& marks) const {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const auto at = stack.back();
      stack.pop_back();
      marks[at] = true;
      for (auto c : children_[at]) stack.push_back(c);
    }
  }

 private:
  const AnnotatedSentence& sentence_;
  std::vector<std::vector<std::size_t>> children_;  // index 0 = virtual root
};

// Candidate sets for each rule, indexed by token (slot 0 unused).
struct RuleMatches {
  explicit RuleMatches(std::size_t n) { for (auto& m : by_role) m.assign(n + 1, false); }
  std::array<std::vector<bool>, 6> by_role;
  std::vector<bool>& operator[](SemanticRole r) { return by_role[static_cast<std::size_t>(r)]; }
};

inline void match_measure(const RuleContext& ctx, const AnnotatedSentence& s, std::vector<bool>& out) {
  for (const auto& t : s.tokens)
    if (t.entity && is_measure_entity(t.entity->label)) ctx.mark_subtree(t.index, out);
  // Degree adverbs attached to a measure, repeated for adverb chains ("very nearly 99%").
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : s.tokens)
      if (!out[t.index] && t.upos == "ADV" && t.head != 0 && out[t.head]) out[t.index] = changed = true;
  }
}

inline void match_agent(const RuleContext& ctx, const AnnotatedSentence& s, std::vector<bool>& out) {
  for (const auto& t : s.tokens) {
    const bool subject = t.deprel == "nsubj" || t.deprel == "nsubj:pass" || t.deprel == "nsubjpass";
    if (subject && ctx.head_of(t) && is_verb(*ctx.head_of(t))) out[t.index] = true;
  }
}

inline void match_action(const RuleContext& ctx, const AnnotatedSentence& s, std::vector<bool>& out) {
  for (const auto& t : s.tokens) {
    if (t.upos != "VERB") continue;
    const auto* head = ctx.head_of(t);
    if (!head || head->upos == "VERB") out[t.index] = true;
  }
  // Particles complete a phrasal verb ("log on").
  for (const auto& t : s.tokens)
    if ((t.deprel == "prt" || t.deprel == "compound:prt") && t.head != 0 && out[t.head]) out[t.index] = true;
}

inline void match_theme(const RuleContext& ctx, const AnnotatedSentence& s, std::vector<bool>& out) {
  for (const auto& t : s.tokens)
    if ((t.deprel == "obj" || t.deprel == "dobj") && ctx.head_of(t) && is_verb(*ctx.head_of(t))) out[t.index] = true;
}

inline void match_goal(const RuleContext& ctx, const AnnotatedSentence& s, const RoleConfig& cfg,
                       std::vector<bool>& out) {
  auto is_dative = [&](const AnnotatedToken& t) { return cfg.dative_prepositions.contains(text::to_lower(t.lemma)); };
  for (const auto& t : s.tokens) {
    if (t.deprel == "iobj" || (t.deprel == "dative" && t.upos != "ADP")) {
      out[t.index] = true;
      continue;
    }
    if (t.deprel != "pobj" && t.deprel != "obl") continue;
    // ClearNLP: noun hangs off the preposition. UD: preposition hangs off the noun as `case`.
    if (const auto* head = ctx.head_of(t); head && is_dative(*head)) {
      out[t.index] = true;
      continue;
    }
    for (auto c : ctx.children(t.index))
      if (ctx.tok(c).deprel == "case" && is_dative(ctx.tok(c))) out[t.index] = true;
  }
}

inline void match_manner(const RuleContext& ctx, const AnnotatedSentence& s, const RoleConfig& cfg,
                         std::vector<bool>& out) {
  for (const auto& t : s.tokens) {
    if (t.upos == "ADJ" || t.upos == "ADV" || t.upos == "DET") {
      out[t.index] = true;
      if (t.head != 0) out[t.head] = true;
      // An adjective's clausal complement belongs to the adjective phrase ("easy to use").
      if (t.upos == "ADJ")
        for (auto c : ctx.children(t.index))
          if (ctx.tok(c).deprel == "xcomp" || ctx.tok(c).deprel == "ccomp") ctx.mark_subtree(c, out);
    }
    const bool preposition = t.upos == "ADP" || t.deprel == "prep" || t.deprel == "case";
    if (preposition && cfg.manner_prepositions.contains(text::to_lower(t.lemma))) {
      // UD `case` markers have no dependents of their own; the phrase is the governing nominal.
      ctx.mark_subtree(t.deprel == "case" && t.head != 0 ? t.head : t.index, out);
    }
  }
}

}  // namespace detail

// Roles for one sentence. `sentence_index` tags the entries so a
// requirement's sentences can be merged.
inline RoleAssignment extract_roles(const AnnotatedSentence& sentence, std::size_t sentence_index = 0,
                                    const RoleConfig& config = {}) {
  RoleAssignment out{sentence.req_id, {}};
  const auto n = sentence.size();
  if (n == 0) return out;
  const detail::RuleContext ctx(sentence);
  detail::RuleMatches m(n);
  detail::match_measure(ctx, sentence, m[SemanticRole::Measure]);
  detail::match_agent(ctx, sentence, m[SemanticRole::Agent]);
  detail::match_action(ctx, sentence, m[SemanticRole::Action]);
  detail::match_theme(ctx, sentence, m[SemanticRole::Theme]);
  detail::match_goal(ctx, sentence, config, m[SemanticRole::Goal]);
  detail::match_manner(ctx, sentence, config, m[SemanticRole::Manner]);

  static constexpr std::array kPrecedence{SemanticRole::Measure, SemanticRole::Agent, SemanticRole::Action,
                                          SemanticRole::Theme,   SemanticRole::Goal,  SemanticRole::Manner};
  for (std::size_t i = 1; i <= n; ++i) {
    if (sentence.tokens[i - 1].upos == "PUNCT") continue;
    for (auto role : kPrecedence) {
      if (m[role][i]) {
        out.assignments.push_back({sentence_index, i, role});
        break;
      }
    }
  }
  return out;
}

// Union over a multi-sentence requirement.
inline RoleAssignment extract_roles(std::span<const AnnotatedSentence> sentences, const RoleConfig& config = {}) {
  RoleAssignment out;
  if (!sentences.empty()) out.req_id = sentences.front().req_id;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto part = extract_roles(sentences[i], i, config);
    out.assignments.insert(out.assignments.end(), part.assignments.begin(), part.assignments.end());
  }
  return out;
}

inline FeatureSet roles_to_features(const RoleAssignment& assignment, std::span<const AnnotatedSentence> sentences,
                                    FeatureMode mode = FeatureMode::Plain,
                                    const WordSet& stopwords = default_stopwords()) {
  FeatureSet out{assignment.req_id, {}};
  for (const auto& e : assignment.assignments) {
    if (e.sentence >= sentences.size() || e.token == 0 || e.token > sentences[e.sentence].size())
      throw ContractError("IndexOutOfRange: role entry (sentence " + std::to_string(e.sentence) + ", token " +
                          std::to_string(e.token) + ") for " + assignment.req_id);
    const auto& tok = sentences[e.sentence].token(e.token);
    if (tok.upos == "PUNCT") continue;
    auto lemma = text::to_lower(tok.lemma);
    if (!keeps_term(lemma, stopwords)) continue;
    if (mode == FeatureMode::RolePrefixed) lemma = std::string(role_name(e.role)) + ":" + lemma;
    out.features.push_back(std::move(lemma));
  }
  return out;
}

// Full selection for one requirement.
inline FeatureSet select_features(std::span<const AnnotatedSentence> sentences, FeatureMode mode = FeatureMode::Plain,
                                  const WordSet& stopwords = default_stopwords(), const RoleConfig& config = {}) {
  return roles_to_features(extract_roles(sentences, config), sentences, mode, stopwords);
}

// One debug line: {"req_id":..., "roles":[[form, role], ...], "features":[...]}.
inline std::string roles_debug_json(const RoleAssignment& assignment, std::span<const AnnotatedSentence> sentences,
                                    const FeatureSet& features) {
  nlohmann::json roles = nlohmann::json::array();
  for (const auto& e : assignment.assignments)
    roles.push_back({sentences[e.sentence].token(e.token).form, std::string(role_name(e.role))});
  nlohmann::json line{{"req_id", assignment.req_id}, {"roles", roles}, {"features", features.features}};
  return line.dump();
}

}  // namespace hc4rc
