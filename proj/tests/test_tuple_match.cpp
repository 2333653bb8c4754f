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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "vindex/caption/matching.hpp"
#include "vindex/random.hpp"

using namespace vindex;
using namespace vindex::caption;

namespace {

TupleSet c1_candidate() {
  TupleRecord r;
  r.objects = {"building", "city street", "truck", "tree", "car"};
  r.attributes = {{"car", {"red"}}, {"tree", {"green"}}, {"truck", {"white"}}, {"building", {"tall"}}};
  r.relations = {{"truck", "drive down", "city street"}, {"car", "drive down", "city street"},
                 {"building", "in", "background"}};
  return ingest_tuples(r);
}

TupleSet c1_reference() {
  TupleRecord r;
  r.objects = {"sky", "edifice", "car", "street", "truck", "city street", "tree"};
  r.attributes = {{"car", {"red"}}, {"city street", {"busy"}}, {"truck", {"white"}},
                  {"tree", {"green"}}, {"edifice", {"modern"}}, {"sky", {"blue", "clear"}}};
  r.relations = {{"tree", "surround", "street"}, {"edifice", "stand under", "sky"},
                 {"car", "run in front of", "city street"}};
  return ingest_tuples(r);
}

SynonymLexicon c1_lexicon() {
  SynonymLexicon lex;
  lex.add("building", {"edifice"});
  return lex;
}

const std::vector<std::string> kVocab = {"dog", "puppy", "cat", "kitten", "car", "truck", "tree", "bush",
                                         "red", "crimson", "green", "white", "on", "near", "sit on", "ride"};

EmbeddingTable random_table(RandomStream& r, int dim = 4) {
  EmbeddingTable t(dim);
  for (const auto& w : kVocab) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = r.normal();
    t.insert(w, v);
  }
  return t;
}

TupleSet random_tuples(RandomStream& r) {
  TupleSet t;
  const std::vector<std::string> nouns(kVocab.begin(), kVocab.begin() + 8);
  const std::vector<std::string> adjs = {"red", "crimson", "green", "white"};
  const std::vector<std::string> preds = {"on", "near", "sit on", "ride"};
  const auto n = 1 + r.below(5);
  for (std::uint64_t i = 0; i < n; ++i) t.objects.insert(nouns[r.below(nouns.size())]);
  const std::vector<std::string> objs(t.objects.begin(), t.objects.end());
  for (std::uint64_t i = 0, m = r.below(4); i < m; ++i)
    t.attributes[objs[r.below(objs.size())]].insert(adjs[r.below(adjs.size())]);
  for (std::uint64_t i = 0, m = r.below(3); i < m; ++i)
    t.relations.insert({objs[r.below(objs.size())], preds[r.below(preds.size())], objs[r.below(objs.size())]});
  return t;
}

}  // namespace

TEST_CASE("cosine_similarity") {
  Eigen::Vector3d u(1, 2, 3);
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0));
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == doctest::Approx(0.0));
  CHECK(cosine_similarity(u, Eigen::Vector3d(-u)) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine_similarity(u, Eigen::Vector3d::Zero()), DegenerateVector);
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd(u), Eigen::VectorXd::Ones(2)), ShapeError);
}

TEST_CASE("embedding table") {
  EmbeddingTable t(2);
  t.insert("city", Eigen::Vector2d(1, 0));
  t.insert("street", Eigen::Vector2d(0, 1));
  CHECK_THROWS_AS(t.insert("x", Eigen::Vector3d(1, 1, 1)), ShapeError);
  CHECK(t.lookup("city street")->isApprox(Eigen::Vector2d(0.5, 0.5)));
  CHECK_FALSE(t.lookup("city hall").has_value());
}

TEST_CASE("match_category stages") {
  const std::vector<std::string> cand = {"building", "city street", "truck", "tree", "car"};
  const std::vector<std::string> ref = {"sky", "edifice", "car", "street", "truck", "city street", "tree"};
  const auto m = match_category(cand, ref, c1_lexicon(), EmbeddingTable{});
  CHECK(m.pairs.size() == 5);
  bool saw_synonym = false;
  for (const auto& p : m.pairs) {
    if (p.candidate == "building") {
      CHECK(p.reference == "edifice");
      CHECK(p.stage == MatchStage::synonym);
      saw_synonym = true;
    } else {
      CHECK(p.stage == MatchStage::exact);
    }
  }
  CHECK(saw_synonym);

  const std::vector<std::string> one = {"dog"};
  const auto same = match_category(one, one, {}, {});
  REQUIRE(same.pairs.size() == 1);
  CHECK(same.pairs[0].stage == MatchStage::exact);

  EmbeddingTable t(2);
  t.insert("cat", Eigen::Vector2d(1, 0.1));
  t.insert("dog", Eigen::Vector2d(1, 0.2));
  const std::vector<std::string> cat = {"cat"}, dog = {"dog"};
  MatchOptions strict;
  strict.threshold = 1.0;
  CHECK(match_category(cat, dog, {}, t, strict).pairs.empty());
  const auto loose = match_category(cat, dog, {}, t);
  REQUIRE(loose.pairs.size() == 1);
  CHECK(loose.pairs[0].stage == MatchStage::semantic);
}

TEST_CASE("exact matches take priority over synonyms") {
  SynonymLexicon lex;
  lex.add("car", {"automobile"});
  const std::vector<std::string> cand = {"automobile", "car"};
  const std::vector<std::string> ref = {"car"};
  const auto m = match_category(cand, ref, lex, {});
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].candidate == "car");
  CHECK(m.pairs[0].stage == MatchStage::exact);
}

TEST_CASE("semantic stage records terms without embeddings") {
  EmbeddingTable t(2);
  t.insert("cat", Eigen::Vector2d(1, 0));
  const std::vector<std::string> cand = {"cat"}, ref = {"zebra"};
  const auto m = match_category(cand, ref, {}, t);
  CHECK(m.pairs.empty());
  CHECK(m.missing_terms == std::vector<std::string>{"zebra"});
}

TEST_CASE("prf") {
  const auto s = prf(5, 5, 7);
  CHECK(s.precision == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.recall == doctest::Approx(0.714286).epsilon(1e-6));
  CHECK(s.f1 == doctest::Approx(0.833333).epsilon(1e-6));
  const auto k = prf(4, 4, 4);
  CHECK(k.precision == 1.0);
  CHECK(k.recall == 1.0);
  CHECK(k.f1 == 1.0);
  const auto z = prf(0, 0, 0);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
}

TEST_CASE("match_tuplesets on the worked example") {
  const auto r = match_tuplesets(c1_candidate(), c1_reference(), c1_lexicon(), {});
  CHECK(r.object.n_matched == 5);
  CHECK(r.object.n_candidate == 5);
  CHECK(r.object.n_reference == 7);
  CHECK(r.object.scores.precision == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.object.scores.recall == doctest::Approx(0.7143).epsilon(1e-4));
  CHECK(r.object.scores.f1 == doctest::Approx(0.8333).epsilon(1e-4));
  // red, green, white match on matched objects; tall vs modern does not
  CHECK(r.attribute.n_matched == 3);
  CHECK(r.attribute.n_candidate == 4);
  CHECK(r.attribute.n_reference == 7);
  CHECK(r.relation.n_matched == 0);
}

TEST_CASE("identical and empty tuple sets") {
  const auto c = c1_candidate();
  const auto same = match_tuplesets(c, c, {}, {});
  for (const auto* cat : {&same.object, &same.attribute, &same.relation}) {
    CHECK(cat->scores.precision == 1.0);
    CHECK(cat->scores.recall == 1.0);
    CHECK(cat->scores.f1 == 1.0);
  }
  const auto empty = match_tuplesets(TupleSet{}, c, {}, {});
  for (const auto* cat : {&empty.object, &empty.attribute, &empty.relation}) {
    CHECK(cat->scores.precision == 0.0);
    CHECK(cat->scores.recall == 0.0);
    CHECK(cat->scores.f1 == 0.0);
  }
  const auto both = match_tuplesets(TupleSet{}, TupleSet{}, {}, {});
  CHECK(both.object.scores.f1 == 1.0);
}

TEST_CASE("flat attribute matching ignores the owning object") {
  MatchOptions flat;
  flat.attributes_require_object = false;
  const auto r = match_tuplesets(c1_candidate(), c1_reference(), {}, {}, flat);
  CHECK(r.attribute.n_matched == 3);
  TupleSet a, b;
  a.objects = {"cat"};
  a.attributes = {{"cat", {"black"}}};
  b.objects = {"dog"};
  b.attributes = {{"dog", {"black"}}};
  CHECK(match_tuplesets(a, b, {}, {}).attribute.n_matched == 0);
  CHECK(match_tuplesets(a, b, {}, {}, flat).attribute.n_matched == 1);
}

TEST_CASE("relations match as whole triples through the stages") {
  TupleSet a, b;
  a.objects = {"man", "horse"};
  a.relations = {{"man", "ride", "horse"}};
  b.objects = {"person", "horse"};
  b.relations = {{"person", "ride", "horse"}};
  CHECK(match_tuplesets(a, b, {}, {}).relation.n_matched == 0);
  SynonymLexicon lex;
  lex.add("man", {"person"});
  const auto r = match_tuplesets(a, b, lex, {});
  CHECK(r.relation.n_matched == 1);
  REQUIRE(r.relation.trace.size() == 1);
  CHECK(r.relation.trace[0].stage == MatchStage::synonym);
}

TEST_CASE("corpus_report") {
  const std::vector<std::pair<TupleSet, TupleSet>> one = {{c1_candidate(), c1_reference()}};
  const auto single = corpus_report(one, c1_lexicon(), {});
  const auto direct = match_tuplesets(c1_candidate(), c1_reference(), c1_lexicon(), {});
  CHECK(single.object.scores.f1 == direct.object.scores.f1);
  CHECK(single.attribute.scores.f1 == direct.attribute.scores.f1);

  const std::vector<std::pair<TupleSet, TupleSet>> many(6, one.front());
  const auto dup = corpus_report(many, c1_lexicon(), {});
  CHECK(dup.object.scores.precision == doctest::Approx(single.object.scores.precision));
  CHECK(dup.object.scores.recall == doctest::Approx(single.object.scores.recall));
  CHECK(dup.object.n_matched == 30);

  TupleSet cand, ref;
  cand.objects = {"dog"};
  ref.objects = {"dog", "cat"};
  const std::vector<std::pair<TupleSet, TupleSet>> two = {{cand, ref}, {cand, ref}};
  const auto r = corpus_report(two, {}, {});
  CHECK(r.object.scores.precision == 1.0);
  CHECK(r.object.scores.recall == 0.5);

  CHECK_THROWS_AS(corpus_report({}, {}, {}), EmptyCorpus);
}

TEST_CASE("macro averaging averages per-pair scores") {
  TupleSet a, b, c;
  a.objects = {"dog"};
  b.objects = {"dog", "cat", "cow", "pig"};
  c.objects = {"dog"};
  const std::vector<std::pair<TupleSet, TupleSet>> pairs = {{a, b}, {a, c}};
  const auto macro = corpus_report(pairs, {}, {}, {}, Averaging::macro);
  CHECK(macro.object.scores.recall == doctest::Approx((0.25 + 1.0) / 2));
  const auto micro = corpus_report(pairs, {}, {}, {}, Averaging::micro);
  CHECK(micro.object.scores.recall == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("swapping candidate and reference swaps precision and recall") {
  RandomStream r(Seed{21});
  const auto table = random_table(r);
  SynonymLexicon lex;
  lex.add("dog", {"puppy"});
  lex.add("red", {"crimson"});
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_tuples(r), b = random_tuples(r);
    MatchOptions opt;
    opt.threshold = r.uniform();
    const auto ab = match_tuplesets(a, b, lex, table, opt);
    const auto ba = match_tuplesets(b, a, lex, table, opt);
    for (auto [x, y] : {std::pair{&ab.object, &ba.object}, {&ab.attribute, &ba.attribute},
                        {&ab.relation, &ba.relation}}) {
      CHECK(x->n_matched == y->n_matched);
      CHECK(x->scores.precision == y->scores.recall);
      CHECK(x->scores.recall == y->scores.precision);
      CHECK(x->scores.f1 == y->scores.f1);
    }
  }
}

TEST_CASE("lowering the threshold never loses matches") {
  RandomStream r(Seed{8});
  const auto table = random_table(r, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_tuples(r), b = random_tuples(r);
    std::size_t prev_obj = 0, prev_attr = 0;
    for (double th = 1.0; th >= -0.001; th -= 0.1) {
      MatchOptions opt;
      opt.threshold = std::max(th, 0.0);
      const auto m = match_tuplesets(a, b, {}, table, opt);
      CHECK(m.object.n_matched >= prev_obj);
      CHECK(m.attribute.n_matched >= prev_attr);
      prev_obj = m.object.n_matched;
      prev_attr = m.attribute.n_matched;
    }
  }
}

TEST_CASE("without lexicon and table only exact matches count") {
  RandomStream r(Seed{13});
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_tuples(r), b = random_tuples(r);
    std::size_t exact = 0;
    for (const auto& o : a.objects) exact += b.objects.count(o);
    const auto m = match_tuplesets(a, b, {}, {});
    CHECK(m.object.n_matched == exact);
  }
}

TEST_CASE("report invariants on random pairs") {
  RandomStream r(Seed{17});
  const auto table = random_table(r);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_tuples(r), b = random_tuples(r);
    const auto m = match_tuplesets(a, b, {}, table);
    for (const auto* c : {&m.object, &m.attribute, &m.relation}) {
      CHECK(c->n_matched <= std::min(c->n_candidate, c->n_reference));
      for (double v : {c->scores.precision, c->scores.recall, c->scores.f1}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
      if (c->n_candidate + c->n_reference > 0) CHECK((c->scores.f1 == 0.0) == (c->n_matched == 0));
      const double p = c->scores.precision, rc = c->scores.recall;
      if (p + rc > 0) CHECK(c->scores.f1 == doctest::Approx(2 * p * rc / (p + rc)));
    }
  }
}

TEST_CASE("threshold outside [0,1] is rejected") {
  MatchOptions bad;
  bad.threshold = 1.5;
  CHECK_THROWS_AS(match_tuplesets(c1_candidate(), c1_reference(), {}, {}, bad), ValidationError);
}
