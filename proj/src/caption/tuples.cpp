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

#include <sstream>

#include "vindex/caption/tuples.hpp"

namespace vindex::caption {

std::size_t TupleSet::attribute_count() const {
  std::size_t n = 0;
  for (const auto& [obj, attrs] : attributes) n += attrs.size();
  return n;
}

bool is_scene_region(std::string_view term) {
  static const std::set<std::string, std::less<>> regions = {
      "background", "foreground", "distance", "scene", "image", "picture",
      "photo",      "photograph", "view",     "frame", "middle", "center",
  };
  return regions.count(term) > 0;
}

void TupleSet::validate() const {
  for (const auto& o : objects)
    if (o.empty()) throw ValidationError("objects: empty term");
  for (const auto& [obj, attrs] : attributes) {
    if (!objects.count(obj)) throw ValidationError("attributes: key '" + obj + "' is not an object");
    for (const auto& a : attrs)
      if (a.empty()) throw ValidationError("attributes['" + obj + "']: empty term");
  }
  for (const auto& r : relations) {
    for (const std::string* end : {&r.subject, &r.object}) {
      if (!objects.count(*end) && !is_scene_region(*end))
        throw ValidationError("relations: endpoint '" + *end + "' is not an object");
    }
    if (r.predicate.empty()) throw ValidationError("relations: empty predicate");
  }
}

namespace {

std::string normalize_predicate(std::string_view p) {
  std::istringstream in{std::string(p)};
  std::string w, out;
  bool first = true;
  while (in >> w) {
    for (auto& c : w) c = char(std::tolower(static_cast<unsigned char>(c)));
    if (first) w = verb_lemma(w);
    first = false;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

TupleSet ingest_tuples(const TupleRecord& record) {
  TupleSet t;
  for (std::size_t i = 0; i < record.objects.size(); ++i) {
    auto o = normalize_term(record.objects[i]);
    if (o.empty()) throw ValidationError("objects[" + std::to_string(i) + "]: empty term");
    t.objects.insert(std::move(o));
  }
  for (const auto& [key, values] : record.attributes) {
    const auto obj = normalize_term(key);
    if (!t.objects.count(obj))
      throw ValidationError("attributes: key '" + key + "' is not among objects");
    auto& set = t.attributes[obj];
    for (const auto& v : values) {
      auto a = normalize_term(v);
      if (a.empty()) throw ValidationError("attributes['" + key + "']: empty term");
      set.insert(std::move(a));
    }
    if (set.empty()) t.attributes.erase(obj);
  }
  for (std::size_t i = 0; i < record.relations.size(); ++i) {
    const auto& r = record.relations[i];
    if (r.size() != 3)
      throw ValidationError("relations[" + std::to_string(i) + "]: expected [subject, predicate, object]");
    Relation rel{normalize_term(r[0]), normalize_predicate(r[1]), normalize_term(r[2])};
    for (const std::string* end : {&rel.subject, &rel.object}) {
      if (!t.objects.count(*end) && !is_scene_region(*end))
        throw ValidationError("relations[" + std::to_string(i) + "]: '" + *end + "' is not among objects");
    }
    if (rel.predicate.empty()) throw ValidationError("relations[" + std::to_string(i) + "]: empty predicate");
    t.relations.insert(std::move(rel));
  }
  return t;
}

void SynonymLexicon::add(std::string_view term, const std::vector<std::string>& synonyms) {
  const auto a = normalize_term(term);
  if (a.empty()) return;
  auto& mine = entries_[a];
  for (const auto& s : synonyms) {
    const auto b = normalize_term(s);
    if (b.empty() || b == a) continue;
    mine.insert(b);
    entries_[b].insert(a);
  }
}

bool SynonymLexicon::are_synonyms(const std::string& a, const std::string& b) const {
  auto it = entries_.find(a);
  return it != entries_.end() && it->second.count(b) > 0;
}

const std::set<std::string>& SynonymLexicon::synonyms_of(const std::string& term) const {
  static const std::set<std::string> none;
  auto it = entries_.find(term);
  return it == entries_.end() ? none : it->second;
}

std::vector<std::string> render_sentences(const TupleSet& tuples) {
  std::vector<std::string> out;
  for (const auto& o : tuples.objects) out.push_back("There is a " + o + ".");
  for (const auto& [obj, attrs] : tuples.attributes)
    for (const auto& a : attrs) out.push_back("The " + obj + " is " + a + ".");
  for (const auto& r : tuples.relations)
    out.push_back("The " + r.subject + " " + r.predicate + " the " + r.object + ".");
  return out;
}

}  // namespace vindex::caption
