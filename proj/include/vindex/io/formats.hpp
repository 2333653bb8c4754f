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

// On-disk formats. Every loader rejects malformed input with FormatError
// (carrying the 1-based line number for line-oriented formats).
//
// JSONL schemas, one object per line, optional "v": 1:
//   caption-pair   {"id", "candidate", "reference"}; each side a caption string or a tuple record
//   tuple-record   {"objects": [..], "attributes": {obj: [..]}, "relations": [[s, p, o], ..]}
//   grounding-item {"expression", "predicted": [x0,y0,x1,y1], "reference": [..], "category"}
//   qa-item        {"id", "question", "options": [a, b, c], "answer": 0..2, "hallucination_probe": bool}
//   qa-response    {"id", "response"}
//   feature-tensor {"height", "width", "dim", "data": [row-major values]}
//
// Binary tensor files hold one or more records of
//   "VFT1" | u32 H | u32 W | u32 D | H*W*D little-endian f64, row-major.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vindex/caption/matching.hpp"
#include "vindex/core.hpp"
#include "vindex/grounding.hpp"
#include "vindex/sqa.hpp"

namespace vindex::io {

std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

caption::EmbeddingTable read_embedding_table(std::istream& in);
caption::EmbeddingTable load_embedding_table(const std::filesystem::path& path);
void write_embedding_table(std::ostream& out, const caption::EmbeddingTable& table);

struct LexiconLoad {
  caption::SynonymLexicon lexicon;
  std::vector<std::string> warnings;
};

LexiconLoad parse_lexicon(std::string_view text);
LexiconLoad load_lexicon(const std::filesystem::path& path);

using CaptionSide = std::variant<std::string, caption::TupleRecord>;

struct CaptionPair {
  std::string id;
  CaptionSide candidate;
  CaptionSide reference;
  std::size_t line = 0;
};

struct QAResponse {
  std::string id;
  std::string response;
};

std::vector<CaptionPair> parse_caption_pairs(std::string_view text);
std::vector<caption::TupleRecord> parse_tuple_records(std::string_view text);
std::vector<GroundingItem> parse_grounding_items(std::string_view text);
std::vector<QAItem> parse_qa_items(std::string_view text);
std::vector<QAResponse> parse_qa_responses(std::string_view text);
std::vector<FeatureGridd> parse_feature_tensors(std::string_view text);

/// Tuple set of one side: records are ingested, strings are parsed.
caption::TupleSet resolve_side(const CaptionSide& side, const caption::ParserOptions& options = {});

std::string tuple_record_json(const caption::TupleSet& tuples);

std::vector<FeatureGridd> read_tensors(std::istream& in);
std::vector<FeatureGridd> load_tensors(const std::filesystem::path& path);
void write_tensor(std::ostream& out, const FeatureGridd& grid);

}  // namespace vindex::io
