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

#include "vindex/caption/matching.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace vindex::caption {

void EmbeddingTable::insert(std::string term, Eigen::VectorXd vector) {
  if (dim_ == 0 && vectors_.empty()) dim_ = vector.size();
  if (vector.size() != dim_)
    throw ShapeError("embedding '" + term + "': length " + std::to_string(vector.size()) + ", expected " +
                     std::to_string(dim_));
  if (!vector.allFinite()) throw ValidationError("embedding '" + term + "': non-finite value");
  vectors_[std::move(term)] = std::move(vector);
}

const Eigen::VectorXd* EmbeddingTable::find(const std::string& term) const {
  auto it = vectors_.find(term);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<Eigen::VectorXd> EmbeddingTable::lookup(const std::string& term) const {
  if (const auto* v = find(term)) return *v;
  std::istringstream in(term);
  std::string w;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim_);
  int n = 0;
  while (in >> w) {
    const auto* v = find(w);
    if (!v) return std::nullopt;
    sum += *v;
    ++n;
  }
  if (n < 2) return std::nullopt;
  return Eigen::VectorXd(sum / double(n));
}

std::string_view to_string(MatchStage s) {
  switch (s) {
    case MatchStage::exact: return "exact";
    case MatchStage::synonym: return "synonym";
    case MatchStage::semantic: return "semantic";
  }
  return "unknown";
}

Scores prf(std::size_t n_matched, std::size_t n_candidate, std::size_t n_reference) {
  Scores s;
  if (n_candidate > 0) s.precision = double(n_matched) / double(n_candidate);
  if (n_reference > 0) s.recall = double(n_matched) / double(n_reference);
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

void CategoryReport::finalize() {
  if (n_candidate == 0 && n_reference == 0) {
    scores = {1.0, 1.0, 1.0};
    return;
  }
  scores = prf(n_matched, n_candidate, n_reference);
}

namespace {

/// Best stage at which a candidate/reference pair agrees, with its similarity.
struct Agreement {
  MatchStage stage;
  double similarity;
};

struct Edge {
  std::size_t c, r;
  Agreement agreement;
  std::string key;  // order-independent tie-break
};

std::string unordered_key(const std::string& a, const std::string& b) {
  return a < b ? a + '\x1f' + b : b + '\x1f' + a;
}

/// Greedy one-to-one assignment, stage by stage; semantic edges by descending similarity.
std::vector<std::pair<std::size_t, std::size_t>> staged_assign(std::vector<Edge> edges, std::size_t n_c,
                                                               std::size_t n_r, std::vector<Agreement>* used) {
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.agreement.stage != b.agreement.stage) return a.agreement.stage < b.agreement.stage;
    if (a.agreement.similarity != b.agreement.similarity) return a.agreement.similarity > b.agreement.similarity;
    return a.key < b.key;
  });
  std::vector<bool> c_used(n_c, false), r_used(n_r, false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& e : edges) {
    if (c_used[e.c] || r_used[e.r]) continue;
    c_used[e.c] = r_used[e.r] = true;
    out.emplace_back(e.c, e.r);
    if (used) used->push_back(e.agreement);
  }
  return out;
}

class TermComparer {
 public:
  TermComparer(const SynonymLexicon& lexicon, const EmbeddingTable& table, const MatchOptions& options)
      : lexicon_(lexicon), table_(table), options_(options) {}

  std::optional<Agreement> compare(const std::string& a, const std::string& b) {
    if (a == b) return Agreement{MatchStage::exact, 1.0};
    if (options_.use_synonyms && lexicon_.are_synonyms(a, b)) return Agreement{MatchStage::synonym, 1.0};
    if (!semantic_enabled()) return std::nullopt;
    const auto* va = embedding(a);
    const auto* vb = embedding(b);
    if (!va || !vb) return std::nullopt;
    double sim = 0.0;
    try {
      sim = cosine_similarity(*va, *vb);
    } catch (const DegenerateVector&) {
      return std::nullopt;
    }
    if (sim > options_.threshold) return Agreement{MatchStage::semantic, sim};
    return std::nullopt;
  }

  bool semantic_enabled() const { return options_.use_semantic && !table_.empty(); }

  /// Records a term that reached the semantic stage without an embedding.
  void note_if_missing(const std::string& term, std::set<std::string>& missing) {
    if (semantic_enabled() && !embedding(term)) missing.insert(term);
  }

 private:
  const Eigen::VectorXd* embedding(const std::string& t) {
    auto it = cache_.find(t);
    if (it == cache_.end()) it = cache_.emplace(t, table_.lookup(t)).first;
    return it->second ? &*it->second : nullptr;
  }

  const SynonymLexicon& lexicon_;
  const EmbeddingTable& table_;
  const MatchOptions& options_;
  std::map<std::string, std::optional<Eigen::VectorXd>> cache_;
};

template <typename Item, typename Compare, typename Render>
std::vector<MatchPair> match_items(const std::vector<Item>& cands, const std::vector<Item>& refs, Compare compare,
                                   Render render, std::vector<std::pair<std::size_t, std::size_t>>* assignment) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if (auto a = compare(cands[i], refs[j]))
        edges.push_back({i, j, *a, unordered_key(render(cands[i]), render(refs[j]))});
    }
  }
  std::vector<Agreement> used;
  auto assigned = staged_assign(std::move(edges), cands.size(), refs.size(), &used);
  std::vector<MatchPair> pairs;
  for (std::size_t k = 0; k < assigned.size(); ++k) {
    const auto [i, j] = assigned[k];
    pairs.push_back({render(cands[i]), render(refs[j]), used[k].stage, used[k].similarity});
  }
  if (assignment) *assignment = std::move(assigned);
  return pairs;
}

CategoryMatch match_terms(const std::vector<std::string>& cands, const std::vector<std::string>& refs,
                          TermComparer& comparer,
                          std::vector<std::pair<std::size_t, std::size_t>>* assignment = nullptr) {
  std::vector<std::pair<std::size_t, std::size_t>> assigned;
  CategoryMatch m;
  m.pairs = match_items(
      cands, refs, [&](const std::string& a, const std::string& b) { return comparer.compare(a, b); },
      [](const std::string& s) { return s; }, &assigned);

  std::vector<bool> c_used(cands.size()), r_used(refs.size());
  for (auto [i, j] : assigned) c_used[i] = r_used[j] = true;
  std::set<std::string> missing;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (!c_used[i]) comparer.note_if_missing(cands[i], missing);
  for (std::size_t j = 0; j < refs.size(); ++j)
    if (!r_used[j]) comparer.note_if_missing(refs[j], missing);
  m.missing_terms.assign(missing.begin(), missing.end());
  if (assignment) *assignment = std::move(assigned);
  return m;
}

std::string render_relation(const Relation& r) { return r.subject + " | " + r.predicate + " | " + r.object; }

void merge_missing(std::vector<std::string>& into, const std::vector<std::string>& from) {
  std::set<std::string> all(into.begin(), into.end());
  all.insert(from.begin(), from.end());
  into.assign(all.begin(), all.end());
}

}  // namespace

CategoryMatch match_category(std::span<const std::string> candidates, std::span<const std::string> references,
                             const SynonymLexicon& lexicon, const EmbeddingTable& table,
                             const MatchOptions& options) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw ValidationError("match threshold must lie in [0, 1]");
  TermComparer comparer(lexicon, table, options);
  return match_terms({candidates.begin(), candidates.end()}, {references.begin(), references.end()}, comparer);
}

MatchReport match_tuplesets(const TupleSet& candidate, const TupleSet& reference, const SynonymLexicon& lexicon,
                            const EmbeddingTable& table, const MatchOptions& options) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw ValidationError("match threshold must lie in [0, 1]");
  TermComparer comparer(lexicon, table, options);
  MatchReport report;

  // Objects.
  const std::vector<std::string> c_obj(candidate.objects.begin(), candidate.objects.end());
  const std::vector<std::string> r_obj(reference.objects.begin(), reference.objects.end());
  std::vector<std::pair<std::size_t, std::size_t>> obj_assignment;
  auto objects = match_terms(c_obj, r_obj, comparer, &obj_assignment);
  report.object.n_matched = objects.pairs.size();
  report.object.n_candidate = c_obj.size();
  report.object.n_reference = r_obj.size();
  report.object.trace = std::move(objects.pairs);
  merge_missing(report.missing_terms, objects.missing_terms);

  // Attributes.
  report.attribute.n_candidate = candidate.attribute_count();
  report.attribute.n_reference = reference.attribute_count();
  auto attrs_of = [](const TupleSet& t, const std::string& obj) {
    std::vector<std::string> out;
    if (auto it = t.attributes.find(obj); it != t.attributes.end()) out.assign(it->second.begin(), it->second.end());
    return out;
  };
  if (options.attributes_require_object) {
    for (auto [i, j] : obj_assignment) {
      auto m = match_terms(attrs_of(candidate, c_obj[i]), attrs_of(reference, r_obj[j]), comparer);
      for (auto& p : m.pairs) {
        p.candidate = c_obj[i] + ": " + p.candidate;
        p.reference = r_obj[j] + ": " + p.reference;
        report.attribute.trace.push_back(std::move(p));
      }
      merge_missing(report.missing_terms, m.missing_terms);
    }
  } else {
    std::vector<std::string> ca, ra;
    for (const auto& [o, s] : candidate.attributes) ca.insert(ca.end(), s.begin(), s.end());
    for (const auto& [o, s] : reference.attributes) ra.insert(ra.end(), s.begin(), s.end());
    auto m = match_terms(ca, ra, comparer);
    report.attribute.trace = std::move(m.pairs);
    merge_missing(report.missing_terms, m.missing_terms);
  }
  report.attribute.n_matched = report.attribute.trace.size();

  // Relations, matched as whole triples; a pair's stage is its weakest component's.
  const std::vector<Relation> c_rel(candidate.relations.begin(), candidate.relations.end());
  const std::vector<Relation> r_rel(reference.relations.begin(), reference.relations.end());
  auto compare_rel = [&](const Relation& a, const Relation& b) -> std::optional<Agreement> {
    Agreement worst{MatchStage::exact, 1.0};
    for (auto [x, y] : {std::pair{&a.subject, &b.subject}, std::pair{&a.predicate, &b.predicate},
                        std::pair{&a.object, &b.object}}) {
      auto g = comparer.compare(*x, *y);
      if (!g) return std::nullopt;
      worst.stage = std::max(worst.stage, g->stage);
      worst.similarity = std::min(worst.similarity, g->similarity);
    }
    return worst;
  };
  report.relation.trace = match_items(c_rel, r_rel, compare_rel, render_relation, nullptr);
  report.relation.n_matched = report.relation.trace.size();
  report.relation.n_candidate = c_rel.size();
  report.relation.n_reference = r_rel.size();

  report.object.finalize();
  report.attribute.finalize();
  report.relation.finalize();
  return report;
}

MatchReport corpus_report(std::span<const std::pair<TupleSet, TupleSet>> pairs, const SynonymLexicon& lexicon,
                          const EmbeddingTable& table, const MatchOptions& options, Averaging averaging) {
  if (pairs.empty()) throw EmptyCorpus("corpus_report: no caption pairs");
  MatchReport total;
  Scores sum_obj, sum_attr, sum_rel;
  auto accumulate = [](CategoryReport& into, CategoryReport& from, Scores& sum) {
    into.n_matched += from.n_matched;
    into.n_candidate += from.n_candidate;
    into.n_reference += from.n_reference;
    sum.precision += from.scores.precision;
    sum.recall += from.scores.recall;
    sum.f1 += from.scores.f1;
    for (auto& p : from.trace) into.trace.push_back(std::move(p));
  };
  for (const auto& [cand, ref] : pairs) {
    auto r = match_tuplesets(cand, ref, lexicon, table, options);
    accumulate(total.object, r.object, sum_obj);
    accumulate(total.attribute, r.attribute, sum_attr);
    accumulate(total.relation, r.relation, sum_rel);
    merge_missing(total.missing_terms, r.missing_terms);
  }
  if (averaging == Averaging::micro) {
    total.object.finalize();
    total.attribute.finalize();
    total.relation.finalize();
  } else {
    const double n = double(pairs.size());
    for (auto [cat, sum] : {std::pair{&total.object, &sum_obj}, std::pair{&total.attribute, &sum_attr},
                            std::pair{&total.relation, &sum_rel}}) {
      cat->scores = {sum->precision / n, sum->recall / n, sum->f1 / n};
    }
  }
  return total;
}

}  // namespace vindex::caption
