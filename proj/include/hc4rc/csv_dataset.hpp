#pragma once

// Requirements CSV: UTF-8, header `ProjectID,RequirementText,Class`,
// RFC-4180 quoting (doubled quotes, embedded commas and newlines).

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "hc4rc/corpus.hpp"
#include "hc4rc/errors.hpp"

namespace hc4rc {

namespace csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // physical line where the record starts
};

// Splits a whole document into records. Throws MalformedRow on an
// unterminated quoted field.
inline std::vector<Record> parse(std::string_view data) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank physical line is not a record.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) records.push_back(std::move(current));
    current = Record{};
    current.line = line;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < data.size() && data[i + 1] == '\n') break;
        ++line;
        end_record();
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("MalformedRow", "line", current.line, "unterminated quoted field");
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

}  // namespace csv

namespace detail {

inline std::size_t find_column(const std::vector<std::string>& header, std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto h = text::to_lower(text::trim(header[i]));
    for (auto name : names)
      if (h == name) return i;
  }
  return header.size();
}

}  // namespace detail

// Rows are numbered from 1 at the first data row; req_id is
// `<ProjectID>-<row>`. Labels are upper-cased.
inline Dataset parse_dataset(std::string_view data) {
  // Skip a UTF-8 byte order mark.
  if (data.starts_with("\xEF\xBB\xBF")) data.remove_prefix(3);
  const auto records = csv::parse(data);
  if (records.empty()) throw ParseError("MissingColumn", "row", 0, "no header row");

  const auto& header = records.front().fields;
  const auto project_col = detail::find_column(header, {"projectid"});
  const auto text_col = detail::find_column(header, {"requirementtext"});
  // PROMISE-exp ships the class column as `_class_`.
  const auto class_col = detail::find_column(header, {"class", "_class_"});
  if (project_col == header.size()) throw ParseError("MissingColumn", "row", 0, "ProjectID");
  if (text_col == header.size()) throw ParseError("MissingColumn", "row", 0, "RequirementText");
  if (class_col == header.size()) throw ParseError("MissingColumn", "row", 0, "Class");
  if (records.size() == 1) throw ParseError("EmptyDataset", "row", 0, "header present but no data rows");

  Dataset ds;
  std::set<Label> labels;
  std::set<std::string> projects;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t row = 1; row < records.size(); ++row) {
    const auto& rec = records[row];
    if (rec.fields.size() != header.size())
      throw ParseError("MalformedRow", "row", row,
                       "expected " + std::to_string(header.size()) + " columns, got " +
                           std::to_string(rec.fields.size()));
    Requirement r;
    r.project_id = std::string(text::trim(rec.fields[project_col]));
    r.text = std::string(text::trim(rec.fields[text_col]));
    r.label = text::to_upper(text::trim(rec.fields[class_col]));
    if (r.project_id.empty()) throw ParseError("MalformedRow", "row", row, "empty ProjectID");
    if (r.text.empty()) throw ParseError("MalformedRow", "row", row, "empty RequirementText");
    if (r.label.empty()) throw ParseError("MalformedRow", "row", row, "empty Class");
    r.req_id = r.project_id + "-" + std::to_string(row);
    if (!seen_ids.insert(r.req_id).second) throw ParseError("DuplicateReqId", "row", row, r.req_id);
    labels.insert(r.label);
    projects.insert(r.project_id);
    ds.requirements.push_back(std::move(r));
  }
  ds.label_set.assign(labels.begin(), labels.end());
  ds.project_set.assign(projects.begin(), projects.end());
  return ds;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Dataset load_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

}  // namespace hc4rc
