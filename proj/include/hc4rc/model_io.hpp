#pragma once

// Model files.
//
// Linear model block (all integers and floats little-endian):
//
//   magic      8 bytes  "HC4RCSVM"
//   version    u32      1
//   kind       u32      0 = one-vs-rest multiclass, 1 = binary
//   dimension  u64
//   n_labels   u64      then per label: u64 byte length + UTF-8 bytes
//   per model  f64 bias, then `dimension` f64 weights
//
// A multiclass block carries one model per label; a binary block carries
// the labels [positive, negative] and a single model.
//
// Hierarchical container:
//
//   "HC4RCHIER 1\n"
//   one line of JSON manifest: decomposition plan, vocabulary (terms, df,
//   corpus size), weighting, and the byte length of each section
//   the sections back to back: f_maj, then f_super and f_min if present

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hc4rc/errors.hpp"
#include "hc4rc/hierarchy.hpp"
#include "hc4rc/svm.hpp"

namespace hc4rc {

namespace io {

inline constexpr char kLinearMagic[8] = {'H', 'C', '4', 'R', 'C', 'S', 'V', 'M'};
inline constexpr std::uint32_t kLinearVersion = 1;
inline constexpr std::string_view kHierarchyHeader = "HC4RCHIER 1";

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw DataError("model file truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

inline void put_model(std::string& out, const LinearModel& m) {
  put_f64(out, m.bias);
  for (double w : m.weights) put_f64(out, w);
}

inline LinearModel get_model(Reader& in, std::uint64_t dimension) {
  LinearModel m;
  m.bias = in.f64();
  m.weights.resize(dimension);
  for (auto& w : m.weights) w = in.f64();
  return m;
}

inline void put_header(std::string& out, std::uint32_t kind, std::uint64_t dimension, const std::vector<Label>& labels) {
  out.append(kLinearMagic, sizeof kLinearMagic);
  put_u32(out, kLinearVersion);
  put_u32(out, kind);
  put_u64(out, dimension);
  put_u64(out, labels.size());
  for (const auto& l : labels) put_str(out, l);
}

inline std::uint32_t get_header(Reader& in, std::uint64_t& dimension, std::vector<Label>& labels) {
  if (in.bytes(sizeof kLinearMagic) != std::string_view(kLinearMagic, sizeof kLinearMagic))
    throw DataError("not a linear model file (bad magic)");
  if (const auto v = in.u32(); v != kLinearVersion) throw DataError("unsupported model version " + std::to_string(v));
  const auto kind = in.u32();
  dimension = in.u64();
  const auto n = in.u64();
  for (std::uint64_t i = 0; i < n; ++i) labels.push_back(in.str());
  return kind;
}

}  // namespace io

inline std::string serialize(const MulticlassModel& model) {
  std::string out;
  io::put_header(out, 0, model.dimension(), model.class_labels);
  for (const auto& m : model.per_class_models) io::put_model(out, m);
  return out;
}

inline std::string serialize(const LinearModel& model) {
  std::string out;
  io::put_header(out, 1, model.dimension(), {model.positive_label, model.negative_label});
  io::put_model(out, model);
  return out;
}

inline MulticlassModel deserialize_multiclass(std::string_view data) {
  io::Reader in(data);
  std::uint64_t dimension = 0;
  MulticlassModel model;
  if (io::get_header(in, dimension, model.class_labels) != 0) throw DataError("expected a multiclass model block");
  for (const auto& label : model.class_labels) {
    auto m = io::get_model(in, dimension);
    m.positive_label = label;
    m.negative_label = "rest";
    model.per_class_models.push_back(std::move(m));
  }
  if (!in.done()) throw DataError("trailing bytes after multiclass model");
  return model;
}

inline LinearModel deserialize_binary(std::string_view data) {
  io::Reader in(data);
  std::uint64_t dimension = 0;
  std::vector<Label> labels;
  if (io::get_header(in, dimension, labels) != 1 || labels.size() != 2) throw DataError("expected a binary model block");
  auto m = io::get_model(in, dimension);
  m.positive_label = labels[0];
  m.negative_label = labels[1];
  if (!in.done()) throw DataError("trailing bytes after binary model");
  return m;
}

inline std::string serialize(const HierarchicalModel& model) {
  const auto maj = serialize(model.f_maj);
  const auto super = model.f_super ? serialize(*model.f_super) : std::string{};
  const auto min = model.f_min ? serialize(*model.f_min) : std::string{};
  nlohmann::json plan{{"maj_classes", model.plan.maj_classes}, {"min_classes", model.plan.min_classes},
                      {"maj_count", model.plan.maj_count},     {"min_count", model.plan.min_count},
                      {"total", model.plan.total}};
  nlohmann::json manifest{
      {"plan", plan},
      {"vocabulary",
       {{"terms", model.vocab.terms}, {"df", model.vocab.document_frequency}, {"corpus_size", model.vocab.corpus_size}}},
      {"weighting", model.weighting == Weighting::TfIdf ? "tfidf" : "tf"},
      {"sections", {{"f_maj", maj.size()}, {"f_super", super.size()}, {"f_min", min.size()}}}};
  std::string out(io::kHierarchyHeader);
  out += "\n" + manifest.dump() + "\n";
  out += maj;
  out += super;
  out += min;
  return out;
}

inline HierarchicalModel deserialize_hierarchical(std::string_view data) {
  const auto first = data.find('\n');
  if (first == std::string_view::npos || data.substr(0, first) != io::kHierarchyHeader)
    throw DataError("not a hierarchical model container");
  const auto second = data.find('\n', first + 1);
  if (second == std::string_view::npos) throw DataError("hierarchical container has no manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(data.substr(first + 1, second - first - 1));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad manifest: ") + e.what());
  }

  HierarchicalModel model;
  const auto& plan = manifest.at("plan");
  model.plan.maj_classes = plan.at("maj_classes").get<std::vector<Label>>();
  model.plan.min_classes = plan.at("min_classes").get<std::vector<Label>>();
  model.plan.maj_count = plan.at("maj_count");
  model.plan.min_count = plan.at("min_count");
  model.plan.total = plan.at("total");
  const auto& vocab = manifest.at("vocabulary");
  model.vocab.terms = vocab.at("terms").get<std::vector<std::string>>();
  model.vocab.document_frequency = vocab.at("df").get<std::vector<std::size_t>>();
  model.vocab.corpus_size = vocab.at("corpus_size");
  for (std::size_t i = 0; i < model.vocab.terms.size(); ++i) model.vocab.term_index[model.vocab.terms[i]] = i;
  model.weighting = manifest.at("weighting") == "tf" ? Weighting::RawTf : Weighting::TfIdf;

  const auto& sections = manifest.at("sections");
  io::Reader in(data.substr(second + 1));
  model.f_maj = deserialize_multiclass(in.bytes(sections.at("f_maj").get<std::size_t>()));
  if (const auto n = sections.at("f_super").get<std::size_t>(); n > 0) model.f_super = deserialize_binary(in.bytes(n));
  if (const auto n = sections.at("f_min").get<std::size_t>(); n > 0) model.f_min = deserialize_multiclass(in.bytes(n));
  if (!in.done()) throw DataError("trailing bytes after hierarchical model");
  return model;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace hc4rc
