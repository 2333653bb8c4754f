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

#include <Eigen/Core>
#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vindex/caption/tuples.hpp"

namespace vindex::caption {

/// cos(u, v). Throws ShapeError on a length mismatch, DegenerateVector on a zero vector.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedU>& u,
                                            const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedU::Scalar;
  if (u.size() != v.size()) throw ShapeError("cosine_similarity: length mismatch");
  const Scalar nu = u.norm(), nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw DegenerateVector("cosine_similarity: zero-norm vector");
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

class EmbeddingTable {
 public:
  explicit EmbeddingTable(Eigen::Index dim = 0) : dim_(dim) {}

  /// Throws ShapeError when the vector length differs from dim, ValidationError when non-finite.
  void insert(std::string term, Eigen::VectorXd vector);

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool empty() const noexcept { return vectors_.empty(); }
  const Eigen::VectorXd* find(const std::string& term) const;

  /// The term's vector, else the mean of its words' vectors when every word is present.
  std::optional<Eigen::VectorXd> lookup(const std::string& term) const;

  const std::map<std::string, Eigen::VectorXd>& entries() const noexcept { return vectors_; }

 private:
  Eigen::Index dim_;
  std::map<std::string, Eigen::VectorXd> vectors_;
};

enum class MatchStage { exact, synonym, semantic };

std::string_view to_string(MatchStage s);

struct MatchPair {
  std::string candidate;
  std::string reference;
  MatchStage stage = MatchStage::exact;
  double similarity = 1.0;
};

struct CategoryMatch {
  std::vector<MatchPair> pairs;
  /// Terms skipped by the semantic stage because they have no embedding.
  std::vector<std::string> missing_terms;
};

struct MatchOptions {
  double threshold = 0.5;  // semantic stage accepts similarity strictly above this
  bool use_synonyms = true;
  bool use_semantic = true;
  /// Attributes count only when attached to matched objects (default) or as a flat list.
  bool attributes_require_object = true;
};

/// One-to-one staged matching: all exact matches, then synonyms, then embeddings
/// with similarity > threshold taken greedily in descending similarity. Ties break
/// on the unordered pair of terms, so swapping the roles of the lists yields the
/// same pairs.
CategoryMatch match_category(std::span<const std::string> candidates, std::span<const std::string> references,
                             const SynonymLexicon& lexicon, const EmbeddingTable& table,
                             const MatchOptions& options = {});

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Ratios with 0/0 defined as 0.
Scores prf(std::size_t n_matched, std::size_t n_candidate, std::size_t n_reference);

struct CategoryReport {
  std::size_t n_matched = 0;
  std::size_t n_candidate = 0;
  std::size_t n_reference = 0;
  Scores scores;
  std::vector<MatchPair> trace;

  /// prf of the counts, except both sides empty scores 1 (vacuous agreement).
  void finalize();
};

struct MatchReport {
  CategoryReport object, attribute, relation;
  std::vector<std::string> missing_terms;
};

MatchReport match_tuplesets(const TupleSet& candidate, const TupleSet& reference, const SynonymLexicon& lexicon,
                            const EmbeddingTable& table, const MatchOptions& options = {});

enum class Averaging { micro, macro };

/// Aggregate over caption pairs. Micro sums counts before taking ratios; macro
/// averages per-pair scores. Throws EmptyCorpus on an empty list.
MatchReport corpus_report(std::span<const std::pair<TupleSet, TupleSet>> pairs, const SynonymLexicon& lexicon,
                          const EmbeddingTable& table, const MatchOptions& options = {},
                          Averaging averaging = Averaging::micro);

}  // namespace vindex::caption
