#pragma once

// CoNLL-U reader. Each sentence block carries `# req_id = <id>`; entity
// spans sit in MISC as `NER=B-PERCENT` / `NER=I-PERCENT`. Multiword-token
// ranges (`3-4`) and empty nodes (`5.1`) are skipped.

#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/csv_dataset.hpp"
#include "hc4rc/errors.hpp"

namespace hc4rc {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::optional<EntityTag> parse_misc_entity(std::string_view misc) {
  if (misc == "_") return std::nullopt;
  for (auto item : split(misc, '|')) {
    if (!item.starts_with("NER=")) continue;
    item.remove_prefix(4);
    if (item.size() < 3 || (item[0] != 'B' && item[0] != 'I') || item[1] != '-') return std::nullopt;
    std::string label = text::to_upper(item.substr(2));
    if (!is_measure_entity(label)) return std::nullopt;
    return EntityTag{item[0] == 'B', std::move(label)};
  }
  return std::nullopt;
}

}  // namespace detail

// Throws MalformedConllu / CyclicDependency (line = first line of the
// offending sentence) when the dependency graph is not a single-rooted tree.
inline void validate_tree(const AnnotatedSentence& sentence, std::size_t line = 0) {
  const auto n = sentence.tokens.size();
  if (n == 0) throw ParseError("MalformedConllu", "line", line, "empty sentence");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tok = sentence.tokens[i];
    if (tok.index != i + 1) throw ParseError("MalformedConllu", "line", line, "token ids are not contiguous from 1");
    if (tok.head > n) throw ParseError("MalformedConllu", "line", line, "head out of range at token " + std::to_string(tok.index));
    if (tok.head == tok.index) throw ParseError("CyclicDependency", "line", line, "token " + std::to_string(tok.index) + " heads itself");
    if (tok.head == 0) ++roots;
  }
  if (roots != 1) throw ParseError("MalformedConllu", "line", line, "expected exactly one root, found " + std::to_string(roots));
  // Walk each token to the root; a path longer than n revisits a node.
  for (const auto& tok : sentence.tokens) {
    std::size_t at = tok.index;
    for (std::size_t steps = 0; at != 0; ++steps) {
      if (steps > n) throw ParseError("CyclicDependency", "line", line, "cycle through token " + std::to_string(tok.index));
      at = sentence.tokens[at - 1].head;
    }
  }
}

inline Annotations parse_annotations(std::string_view data) {
  Annotations out;
  AnnotatedSentence current;
  std::string req_id;
  std::size_t block_line = 0;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!current.tokens.empty()) {
      if (req_id.empty()) throw ParseError("MissingReqId", "line", block_line, "sentence block has no `# req_id = ...` comment");
      current.req_id = req_id;
      validate_tree(current, block_line);
      out[req_id].push_back(std::move(current));
    }
    current = AnnotatedSentence{};
    req_id.clear();
    block_line = 0;
  };

  for (auto line : detail::split(data, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    if (block_line == 0) block_line = line_no;
    if (line.front() == '#') {
      auto body = text::trim(line.substr(1));
      if (body.starts_with("req_id")) {
        auto rest = text::trim(body.substr(6));
        if (rest.starts_with("=")) req_id = std::string(text::trim(rest.substr(1)));
      }
      continue;
    }

    const auto cols = detail::split(line, '\t');
    if (cols.size() != 10)
      throw ParseError("MalformedConllu", "line", line_no, "expected 10 columns, got " + std::to_string(cols.size()));
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    AnnotatedToken tok;
    if (!detail::parse_index(cols[0], tok.index)) throw ParseError("MalformedConllu", "line", line_no, "bad ID column");
    if (!detail::parse_index(cols[6], tok.head)) throw ParseError("MalformedConllu", "line", line_no, "bad HEAD column");
    tok.form = std::string(cols[1]);
    tok.lemma = cols[2] == "_" && cols[1] != "_" ? std::string(cols[1]) : std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.deprel = text::to_lower(cols[7]);
    tok.entity = detail::parse_misc_entity(cols[9]);
    current.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

inline Annotations load_annotations(const std::string& path) { return parse_annotations(read_file(path)); }

// Writes sentences back out as CoNLL-U (FEATS/DEPS/XPOS left as `_`).
inline std::string to_conllu(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += "# req_id = " + s.req_id + "\n";
    for (const auto& t : s.tokens) {
      std::string misc = "_";
      if (t.entity) misc = std::string("NER=") + (t.entity->begin ? "B-" : "I-") + t.entity->label;
      out += std::to_string(t.index) + "\t" + t.form + "\t" + t.lemma + "\t" + t.upos + "\t_\t_\t" +
             std::to_string(t.head) + "\t" + t.deprel + "\t_\t" + misc + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace hc4rc
