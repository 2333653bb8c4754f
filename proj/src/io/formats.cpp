// Copyright 2026 The Vindex Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vindex/io/formats.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vindex::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- embeddings

caption::EmbeddingTable read_embedding_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  caption::EmbeddingTable table;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw FormatError("empty line", lineno);
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto next = line.find(' ', pos);
      const auto end = next == std::string::npos ? line.size() : next;
      fields.emplace_back(line.data() + pos, end - pos);
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (fields.size() < 2) throw FormatError("expected 'term v1 ... vd'", lineno);
    Eigen::VectorXd v(Eigen::Index(fields.size() - 1));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto f = fields[i];
      double x = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(x))
        throw FormatError("bad number '" + std::string(f) + "'", lineno);
      v[Eigen::Index(i - 1)] = x;
    }
    if (!have_dim) {
      table = caption::EmbeddingTable(v.size());
      have_dim = true;
    } else if (v.size() != table.dim()) {
      throw FormatError("dimension " + std::to_string(v.size()) + " differs from " + std::to_string(table.dim()),
                        lineno);
    }
    const std::string term(fields[0]);
    if (term.empty()) throw FormatError("empty term", lineno);
    table.insert(term, std::move(v));
  }
  if (!have_dim) throw FormatError("empty embedding file");
  return table;
}

caption::EmbeddingTable load_embedding_table(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_embedding_table(in);
}

void write_embedding_table(std::ostream& out, const caption::EmbeddingTable& table) {
  for (const auto& [term, v] : table.entries()) {
    out << term;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::array<char, 32> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v[i]);
      out << ' ' << std::string_view(buf.data(), std::size_t(res.ptr - buf.data()));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------- lexicon

LexiconLoad parse_lexicon(std::string_view text) {
  LexiconLoad out;
  std::set<std::string> seen;
  json doc;
  try {
    doc = json::parse(text, [&](int depth, json::parse_event_t event, json& parsed) {
      if (depth == 1 && event == json::parse_event_t::key) {
        const auto key = parsed.get<std::string>();
        if (!seen.insert(key).second) out.warnings.push_back("duplicate key '" + key + "': last value wins");
      }
      return true;
    });
  } catch (const json::exception& e) {
    throw FormatError(std::string("lexicon: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("lexicon: expected a JSON object");
  for (const auto& [term, syns] : doc.items()) {
    if (!syns.is_array()) throw FormatError("lexicon: '" + term + "' must map to an array");
    std::vector<std::string> list;
    for (const auto& s : syns) {
      if (!s.is_string()) throw FormatError("lexicon: '" + term + "' has a non-string synonym");
      list.push_back(s.get<std::string>());
    }
    out.lexicon.add(term, list);
  }
  return out;
}

LexiconLoad load_lexicon(const std::filesystem::path& path) { return parse_lexicon(read_file(path)); }

// ---------------------------------------------------------------- JSONL

namespace {

struct Line {
  std::size_t number;
  json value;
};

std::vector<Line> jsonl_objects(std::string_view text, const std::set<std::string>& allowed) {
  std::vector<Line> out;
  std::size_t lineno = 0, pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(e.what(), lineno);
    }
    if (!j.is_object()) throw FormatError("expected a JSON object", lineno);
    for (const auto& [key, value] : j.items()) {
      if (key == "v") {
        if (!value.is_number_integer() || value.get<long long>() != 1)
          throw FormatError("unsupported schema version", lineno);
        continue;
      }
      if (!allowed.count(key)) throw FormatError("unknown field '" + key + "'", lineno);
    }
    out.push_back({lineno, std::move(j)});
  }
  return out;
}

const json& field(const Line& l, const char* key) {
  auto it = l.value.find(key);
  if (it == l.value.end()) throw FormatError(std::string("missing field '") + key + "'", l.number);
  return *it;
}

std::string string_field(const Line& l, const char* key) {
  const auto& v = field(l, key);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be a string", l.number);
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, std::size_t line, const std::string& what) {
  if (!v.is_array()) throw FormatError(what + " must be an array of strings", line);
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw FormatError(what + " must be an array of strings", line);
    out.push_back(s.get<std::string>());
  }
  return out;
}

caption::TupleRecord tuple_record(const json& j, std::size_t line) {
  if (!j.is_object()) throw FormatError("tuple record must be an object", line);
  caption::TupleRecord r;
  for (const auto& [key, value] : j.items()) {
    if (key == "objects") {
      r.objects = string_list(value, line, "objects");
    } else if (key == "attributes") {
      if (!value.is_object()) throw FormatError("attributes must be an object", line);
      for (const auto& [obj, attrs] : value.items()) r.attributes[obj] = string_list(attrs, line, "attributes");
    } else if (key == "relations") {
      if (!value.is_array()) throw FormatError("relations must be an array", line);
      for (const auto& rel : value) {
        auto triple = string_list(rel, line, "relation");
        if (triple.size() != 3) throw FormatError("relation must be [subject, predicate, object]", line);
        r.relations.push_back(std::move(triple));
      }
    } else if (key != "v") {
      throw FormatError("unknown tuple-record field '" + key + "'", line);
    }
  }
  try {
    (void)caption::ingest_tuples(r);
  } catch (const ValidationError& e) {
    throw FormatError(e.what(), line);
  }
  return r;
}

CaptionSide caption_side(const Line& l, const char* key) {
  const auto& v = field(l, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) return tuple_record(v, l.number);
  throw FormatError(std::string("field '") + key + "' must be a caption string or a tuple record", l.number);
}

BBoxd box_field(const Line& l, const char* key) {
  const auto& v = field(l, key);
  if (!v.is_array() || v.size() != 4) throw FormatError(std::string("field '") + key + "' must be [x0,y0,x1,y1]", l.number);
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw FormatError(std::string("field '") + key + "' must hold numbers", l.number);
    c[i] = v[i].get<double>();
    if (!std::isfinite(c[i])) throw FormatError(std::string("field '") + key + "' is not finite", l.number);
  }
  try {
    return BBoxd(c[0], c[1], c[2], c[3]);
  } catch (const ValidationError& e) {
    throw FormatError(e.what(), l.number);
  }
}

}  // namespace

std::vector<CaptionPair> parse_caption_pairs(std::string_view text) {
  std::vector<CaptionPair> out;
  for (const auto& l : jsonl_objects(text, {"id", "candidate", "reference"}))
    out.push_back({string_field(l, "id"), caption_side(l, "candidate"), caption_side(l, "reference"), l.number});
  return out;
}

std::vector<caption::TupleRecord> parse_tuple_records(std::string_view text) {
  std::vector<caption::TupleRecord> out;
  for (const auto& l : jsonl_objects(text, {"objects", "attributes", "relations"}))
    out.push_back(tuple_record(l.value, l.number));
  return out;
}

std::vector<GroundingItem> parse_grounding_items(std::string_view text) {
  std::vector<GroundingItem> out;
  for (const auto& l : jsonl_objects(text, {"expression", "predicted", "reference", "category"})) {
    GroundingItem item;
    item.expression = string_field(l, "expression");
    item.predicted = box_field(l, "predicted");
    item.reference = box_field(l, "reference");
    try {
      item.category = parse_salience_category(string_field(l, "category"));
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), l.number);
    }
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<QAItem> parse_qa_items(std::string_view text) {
  std::vector<QAItem> out;
  for (const auto& l : jsonl_objects(text, {"id", "question", "options", "answer", "hallucination_probe"})) {
    QAItem item;
    item.id = string_field(l, "id");
    item.question = string_field(l, "question");
    const auto options = string_list(field(l, "options"), l.number, "options");
    if (options.size() != QAItem::kOptions) throw FormatError("options must hold exactly 3 strings", l.number);
    std::copy(options.begin(), options.end(), item.options.begin());
    const auto& answer = field(l, "answer");
    if (!answer.is_number_integer() || answer.get<long long>() < 0 || answer.get<long long>() > 2)
      throw FormatError("answer must be an integer in 0..2", l.number);
    item.correct_index = answer.get<std::size_t>();
    if (auto it = l.value.find("hallucination_probe"); it != l.value.end()) {
      if (!it->is_boolean()) throw FormatError("hallucination_probe must be a boolean", l.number);
      item.is_hallucination_probe = it->get<bool>();
    }
    for (const auto& o : item.options)
      if (o.empty()) throw FormatError("empty option", l.number);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<QAResponse> parse_qa_responses(std::string_view text) {
  std::vector<QAResponse> out;
  for (const auto& l : jsonl_objects(text, {"id", "response"}))
    out.push_back({string_field(l, "id"), string_field(l, "response")});
  return out;
}

std::vector<FeatureGridd> parse_feature_tensors(std::string_view text) {
  std::vector<FeatureGridd> out;
  for (const auto& l : jsonl_objects(text, {"height", "width", "dim", "data"})) {
    auto dim_of = [&](const char* key) {
      const auto& v = field(l, key);
      if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw FormatError(std::string("field '") + key + "' must be a positive integer", l.number);
      return Eigen::Index(v.get<long long>());
    };
    const auto H = dim_of("height"), W = dim_of("width"), D = dim_of("dim");
    const auto& data = field(l, "data");
    if (!data.is_array() || Eigen::Index(data.size()) != H * W * D)
      throw FormatError("data must hold height*width*dim numbers", l.number);
    TokenMatrix<double> t(H * W, D);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const auto& x = data[std::size_t(i)];
      if (!x.is_number()) throw FormatError("data must hold numbers", l.number);
      t.data()[i] = x.get<double>();
    }
    try {
      out.emplace_back(H, W, std::move(t));
    } catch (const Error& e) {
      throw FormatError(e.what(), l.number);
    }
  }
  return out;
}

caption::TupleSet resolve_side(const CaptionSide& side, const caption::ParserOptions& options) {
  if (const auto* text = std::get_if<std::string>(&side))
    return caption::extract_tuples(caption::split_sentences(*text), options);
  return caption::ingest_tuples(std::get<caption::TupleRecord>(side));
}

std::string tuple_record_json(const caption::TupleSet& tuples) {
  json j;
  j["objects"] = json::array();
  for (const auto& o : tuples.objects) j["objects"].push_back(o);
  j["attributes"] = json::object();
  for (const auto& [obj, attrs] : tuples.attributes) j["attributes"][obj] = std::vector<std::string>(attrs.begin(), attrs.end());
  j["relations"] = json::array();
  for (const auto& r : tuples.relations) j["relations"].push_back({r.subject, r.predicate, r.object});
  return j.dump();
}

// ---------------------------------------------------------------- binary tensors

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'F', 'T', '1'};

std::uint32_t read_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("tensor: truncated header");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

}  // namespace

std::vector<FeatureGridd> read_tensors(std::istream& in) {
  std::vector<FeatureGridd> out;
  while (true) {
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4 || magic != kMagic) throw FormatError("tensor: bad magic in record " + std::to_string(out.size() + 1));
    const auto H = read_u32(in), W = read_u32(in), D = read_u32(in);
    if (H == 0 || W == 0 || D == 0) throw FormatError("tensor: zero dimension");
    TokenMatrix<double> t(Eigen::Index(H) * W, Eigen::Index(D));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      std::array<unsigned char, 8> b{};
      if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("tensor: truncated data");
      std::uint64_t bits = 0;
      for (int k = 7; k >= 0; --k) bits = bits << 8 | b[std::size_t(k)];
      t.data()[i] = std::bit_cast<double>(bits);
    }
    try {
      out.emplace_back(Eigen::Index(H), Eigen::Index(W), std::move(t));
    } catch (const Error& e) {
      throw FormatError(std::string("tensor: ") + e.what());
    }
  }
  if (out.empty()) throw FormatError("tensor: empty file");
  return out;
}

std::vector<FeatureGridd> load_tensors(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_tensors(in);
}

void write_tensor(std::ostream& out, const FeatureGridd& grid) {
  out.write(kMagic.data(), 4);
  write_u32(out, std::uint32_t(grid.height()));
  write_u32(out, std::uint32_t(grid.width()));
  write_u32(out, std::uint32_t(grid.dim()));
  const auto& t = grid.tokens();
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(t.data()[i]);
    std::array<char, 8> b{};
    for (auto& c : b) {
      c = char(bits & 0xff);
      bits >>= 8;
    }
    out.write(b.data(), 8);
  }
}

}  // namespace vindex::io
