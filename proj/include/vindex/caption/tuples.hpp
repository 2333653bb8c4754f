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

#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vindex/errors.hpp"

namespace vindex::caption {

struct Relation {
  std::string subject;
  std::string predicate;
  std::string object;

  auto operator<=>(const Relation&) const = default;
  bool operator==(const Relation&) const = default;
};

/// Objects, object -> attributes, and relation triples of one caption.
///
/// Attribute keys must be objects. Relation endpoints must be objects or scene
/// regions ("background", "distance", ...), which locate things without being
/// depicted things themselves.
struct TupleSet {
  std::set<std::string> objects;
  std::map<std::string, std::set<std::string>> attributes;
  std::set<Relation> relations;

  bool empty() const { return objects.empty() && attributes.empty() && relations.empty(); }
  std::size_t attribute_count() const;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  bool operator==(const TupleSet&) const = default;
};

/// Terms such as "background" that may close a relation but are never objects.
bool is_scene_region(std::string_view term);

/// Externally produced parse, before normalization and validation.
struct TupleRecord {
  std::vector<std::string> objects;
  std::map<std::string, std::vector<std::string>> attributes;
  std::vector<std::vector<std::string>> relations;
};

/// Normalizes every term and enforces the TupleSet invariants.
TupleSet ingest_tuples(const TupleRecord& record);

/// Symmetric synonym relation over normalized terms.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  /// Adds term <-> each synonym (both directions, normalized).
  void add(std::string_view term, const std::vector<std::string>& synonyms);
  bool are_synonyms(const std::string& a, const std::string& b) const;
  const std::set<std::string>& synonyms_of(const std::string& term) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
};

/// Splits on '.', '!' and '?' runs, except after a known abbreviation ("Mr.", "e.g.")
/// or between digits ("3.5"). Sentences are trimmed; empty ones are dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Lowercases, trims, collapses whitespace, strips a leading article and singularizes
/// the last word. Idempotent.
std::string normalize_term(std::string_view word);

/// Singular form of a single lowercase word via irregulars and ordered suffix rules.
std::string singularize(std::string_view word);

/// Base form of a lowercase verb token ("driving" -> "drive", "lined" -> "line").
std::string verb_lemma(std::string_view word);

struct ParserOptions {
  /// Multiword nouns kept intact as objects; otherwise the head noun is the object.
  std::set<std::string> compounds = default_compounds();

  static std::set<std::string> default_compounds();
};

/// Deterministic rule parser over sentences. Recognized patterns: ADJ* NOUN noun
/// phrases, NP "and" NP coordination, NP [AUX] VERB PREP* NP relations, NP PREP NP
/// relations, and "NP is ADJ" attributes. Anything else contributes nothing.
TupleSet extract_tuples(const std::vector<std::string>& sentences, const ParserOptions& options = {});

/// Renders each object and attribute as "X is Y." / "There is X." sentences and each
/// relation as "S P O." so the parser can read a TupleSet back.
std::vector<std::string> render_sentences(const TupleSet& tuples);

}  // namespace vindex::caption
