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


#include <algorithm>
#include <cctype>
#include <string>

#include "doctest.h"
#include "vindex/caption/tuples.hpp"
#include "vindex/random.hpp"

using namespace vindex;
using namespace vindex::caption;

namespace {

const std::string kCandidate =
    "A red car and a white truck are driving down a city street lined with green trees. "
    "Tall buildings in the background.";

std::string non_space(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

}  // namespace

TEST_CASE("split_sentences") {
  CHECK(split_sentences(kCandidate).size() == 2);
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("   ").empty());
  const auto s = split_sentences("Wait. Stop! Go?");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "Wait.");
  CHECK(s[1] == "Stop!");
  CHECK(s[2] == "Go?");
  CHECK(split_sentences("Mr. Smith walks a dog. It is 3.5 meters long.").size() == 2);
  CHECK(split_sentences("No terminal punctuation").size() == 1);
}

TEST_CASE("split_sentences keeps every non-whitespace character in order") {
  RandomStream r(Seed{11});
  const std::string alphabet = "ab .!?\"')\nMr";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const auto n = r.below(40);
    for (std::uint64_t i = 0; i < n; ++i) text.push_back(alphabet[r.below(alphabet.size())]);
    std::string joined;
    for (const auto& s : split_sentences(text)) joined += s;
    CHECK(non_space(joined) == non_space(text));
  }
}

TEST_CASE("normalize_term") {
  CHECK(normalize_term("Trees") == "tree");
  CHECK(normalize_term("car") == "car");
  CHECK(normalize_term("buses") == "bus");
  CHECK(normalize_term("The  City Streets") == "city street");
  CHECK(normalize_term("people") == "person");
  CHECK(normalize_term("men") == "man");
  CHECK(normalize_term("boxes") == "box");
  CHECK(normalize_term("benches") == "bench");
  CHECK(normalize_term("puppies") == "puppy");
  CHECK(normalize_term("glass") == "glass");
  CHECK(normalize_term("grass") == "grass");
  CHECK(normalize_term("a") == "a");
}

TEST_CASE("normalize_term is idempotent") {
  const char* words[] = {"Trees", "buses", "glasses", "people", "children", "leaves", "knives", "mice",
                         "geese", "boxes", "churches", "dishes", "cities", "bus", "class", "status",
                         "analysis", "the dogs", "A cat", "sheep", "fish", "series", "women", "feet"};
  for (const char* w : words) {
    const auto once = normalize_term(w);
    CHECK_MESSAGE(normalize_term(once) == once, w);
  }
  RandomStream r(Seed{3});
  const std::string alphabet = "aeiousxyzhcA ";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string w;
    const auto n = 1 + r.below(10);
    for (std::uint64_t i = 0; i < n; ++i) w.push_back(alphabet[r.below(alphabet.size())]);
    const auto once = normalize_term(w);
    CHECK_MESSAGE(normalize_term(once) == once, w);
  }
}

TEST_CASE("verb_lemma") {
  CHECK(verb_lemma("driving") == "drive");
  CHECK(verb_lemma("lined") == "line");
  CHECK(verb_lemma("running") == "run");
  CHECK(verb_lemma("sits") == "sit");
  CHECK(verb_lemma("is") == "be");
  CHECK(verb_lemma("carried") == "carry");
  CHECK(verb_lemma("standing") == "stand");
}

TEST_CASE("extract_tuples on the worked candidate caption") {
  const auto t = extract_tuples(split_sentences(kCandidate));
  CHECK(t.objects == std::set<std::string>{"building", "city street", "truck", "tree", "car"});
  CHECK(t.attributes.at("car") == std::set<std::string>{"red"});
  CHECK(t.attributes.at("truck") == std::set<std::string>{"white"});
  CHECK(t.attributes.at("tree") == std::set<std::string>{"green"});
  CHECK(t.attributes.at("building") == std::set<std::string>{"tall"});
  CHECK(t.relations.count({"car", "drive down", "city street"}) == 1);
  CHECK(t.relations.count({"truck", "drive down", "city street"}) == 1);
  CHECK(t.relations.count({"building", "in", "background"}) == 1);
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("extract_tuples small patterns") {
  const auto a = extract_tuples(split_sentences("a red car"));
  CHECK(a.objects == std::set<std::string>{"car"});
  CHECK(a.attributes.at("car") == std::set<std::string>{"red"});
  CHECK(a.relations.empty());

  const auto b = extract_tuples(split_sentences("dog."));
  CHECK(b.objects == std::set<std::string>{"dog"});
  CHECK(b.attributes.empty());
  CHECK(b.relations.empty());

  const auto c = extract_tuples(split_sentences("The dog is brown."));
  CHECK(c.attributes.at("dog") == std::set<std::string>{"brown"});

  const auto d = extract_tuples(split_sentences("A man rides a horse on the beach."));
  CHECK(d.objects == std::set<std::string>{"man", "horse", "beach"});
  CHECK(d.relations.count({"man", "ride", "horse"}) == 1);

  CHECK(extract_tuples({}).empty());
  CHECK(extract_tuples(split_sentences("!!! ???")).empty());
}

TEST_CASE("extract_tuples is deterministic and keeps invariants") {
  const char* captions[] = {
      "Two children play with a ball in the park while their parents watch.",
      "A large brown dog and a small cat are sleeping on a red sofa near the window.",
      "Several people are standing at a bus stop in the rain.",
      "A plate of food sits on a wooden table next to a glass of water.",
  };
  for (const char* c : captions) {
    const auto t1 = extract_tuples(split_sentences(c));
    const auto t2 = extract_tuples(split_sentences(c));
    CHECK(t1 == t2);
    CHECK_NOTHROW(t1.validate());
    CHECK_FALSE(t1.objects.empty());
  }
}

TEST_CASE("parsing rendered tuples recovers a superset of the objects") {
  const char* captions[] = {kCandidate.c_str(), "A man rides a horse on the beach.",
                            "A large brown dog and a small cat are sleeping on a red sofa near the window."};
  for (const char* c : captions) {
    const auto t = extract_tuples(split_sentences(c));
    const auto back = extract_tuples(render_sentences(t));
    for (const auto& o : t.objects) CHECK_MESSAGE(back.objects.count(o) == 1, o);
  }
}

TEST_CASE("ingest_tuples") {
  TupleRecord ref;
  ref.objects = {"sky", "edifice", "car", "street", "truck", "city street", "tree"};
  ref.attributes = {{"car", {"red"}}, {"city street", {"busy"}}, {"truck", {"white"}},
                    {"tree", {"green"}}, {"edifice", {"modern"}}, {"sky", {"blue", "clear"}}};
  ref.relations = {{"tree", "surround", "street"}, {"edifice", "stand under", "sky"},
                   {"car", "run in front of", "city street"}};
  const auto t = ingest_tuples(ref);
  CHECK(t.objects == std::set<std::string>{"sky", "edifice", "car", "street", "truck", "city street", "tree"});
  CHECK(t.attribute_count() == 7);
  CHECK(t.relations.size() == 3);

  TupleRecord bad;
  bad.objects = {"cat"};
  bad.attributes = {{"dog", {"brown"}}};
  CHECK_THROWS_AS(ingest_tuples(bad), ValidationError);

  TupleRecord bad_rel;
  bad_rel.objects = {"cat"};
  bad_rel.relations = {{"cat", "on"}};
  CHECK_THROWS_AS(ingest_tuples(bad_rel), ValidationError);

  TupleRecord dangling;
  dangling.objects = {"cat"};
  dangling.relations = {{"cat", "on", "mat"}};
  CHECK_THROWS_AS(ingest_tuples(dangling), ValidationError);

  CHECK(ingest_tuples(TupleRecord{}).empty());

  TupleRecord plural;
  plural.objects = {"Trees", "The Dogs"};
  plural.attributes = {{"trees", {"Green"}}};
  plural.relations = {{"dogs", "running past", "trees"}};
  const auto p = ingest_tuples(plural);
  CHECK(p.objects == std::set<std::string>{"tree", "dog"});
  CHECK(p.attributes.at("tree") == std::set<std::string>{"green"});
  CHECK(p.relations.count({"dog", "run past", "tree"}) == 1);
}

TEST_CASE("synonym lexicon is symmetric and normalized") {
  SynonymLexicon lex;
  lex.add("Building", {"edifices"});
  CHECK(lex.are_synonyms("building", "edifice"));
  CHECK(lex.are_synonyms("edifice", "building"));
  CHECK_FALSE(lex.are_synonyms("building", "house"));
  CHECK(lex.size() == 2);
}
