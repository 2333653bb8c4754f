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

// Feature-space transforms over token grids: nested (coarse-to-fine) pooling,
// multi-layer aggregation, and token interleaving of two encoders.

#pragma once

#include <utility>
#include <vector>

#include "vindex/core.hpp"

namespace vindex {

/// Mean over each non-overlapping 2x2 block, per channel.
template <typename Scalar>
FeatureGrid<Scalar> avg_pool_2x2(const FeatureGrid<Scalar>& grid) {
  const Eigen::Index h = grid.height(), w = grid.width();
  if (h % 2 != 0 || w % 2 != 0) throw ShapeError("avg_pool_2x2: height and width must be even");
  const Eigen::Index oh = h / 2, ow = w / 2;
  typename FeatureGrid<Scalar>::Tokens out(oh * ow, grid.dim());
  for (Eigen::Index r = 0; r < oh; ++r) {
    for (Eigen::Index c = 0; c < ow; ++c) {
      out.row(r * ow + c) = (grid.token(2 * r, 2 * c) + grid.token(2 * r, 2 * c + 1) +
                             grid.token(2 * r + 1, 2 * c) + grid.token(2 * r + 1, 2 * c + 1)) /
                            Scalar(4);
    }
  }
  return FeatureGrid<Scalar>(oh, ow, std::move(out));
}

template <typename Scalar>
FeatureGrid<Scalar> pool_3x3_to_one(const FeatureGrid<Scalar>& grid) {
  if (grid.height() != 3 || grid.width() != 3) throw ShapeError("pool_3x3_to_one: grid must be 3x3");
  typename FeatureGrid<Scalar>::Tokens out = grid.tokens().colwise().mean();
  return FeatureGrid<Scalar>(1, 1, std::move(out));
}

template <typename Scalar>
struct NestedFeatures {
  /// Finest first; the last level is a single token.
  std::vector<FeatureGrid<Scalar>> levels;

  /// The level holding exactly n tokens.
  const FeatureGrid<Scalar>& with_tokens(Eigen::Index n) const {
    for (const auto& l : levels)
      if (l.token_count() == n) return l;
    throw ShapeError("nested features: no level with " + std::to_string(n) + " tokens");
  }
};

/// Repeated 2x2 mean pooling down to 3x3, then a 3x3 pool to one token
/// (24x24 gives 576/144/36/9/1). Power-of-two sides halve all the way to 1x1.
template <typename Scalar>
NestedFeatures<Scalar> nested_sequence(const FeatureGrid<Scalar>& grid) {
  const Eigen::Index side = grid.height();
  if (side != grid.width() || side < 1) throw ShapeError("nested_sequence: grid must be square");
  Eigen::Index s = side;
  while (s % 2 == 0) s /= 2;
  if (s != 3 && s != 1) throw ShapeError("nested_sequence: side must be 3*2^k or 2^k");

  NestedFeatures<Scalar> nf;
  nf.levels.push_back(grid);
  while (nf.levels.back().height() > 3 ||
         (nf.levels.back().height() == 2)) {
    nf.levels.push_back(avg_pool_2x2(nf.levels.back()));
  }
  if (nf.levels.back().height() == 3) nf.levels.push_back(pool_3x3_to_one(nf.levels.back()));
  return nf;
}

template <typename Scalar>
class LayerStack {
 public:
  explicit LayerStack(std::vector<FeatureGrid<Scalar>> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2) throw ShapeError("layer stack: need at least 2 layers");
    for (const auto& l : layers_)
      if (!l.same_shape(layers_.front())) throw ShapeError("layer stack: layers differ in shape");
  }
  const std::vector<FeatureGrid<Scalar>>& layers() const noexcept { return layers_; }

 private:
  std::vector<FeatureGrid<Scalar>> layers_;
};

/// Splits all layers but the last into n_groups contiguous equal groups, averages
/// element-wise within each group, and concatenates the group means followed by the
/// final layer along channels. Output dim is (n_groups + 1) * D.
template <typename Scalar>
FeatureGrid<Scalar> aggregate_layers(const LayerStack<Scalar>& stack, std::size_t n_groups) {
  const auto& layers = stack.layers();
  const std::size_t grouped = layers.size() - 1;
  if (n_groups == 0 || grouped < n_groups || grouped % n_groups != 0)
    throw ShapeError("aggregate_layers: " + std::to_string(grouped) +
                     " non-final layers cannot form " + std::to_string(n_groups) + " equal groups");
  const std::size_t per_group = grouped / n_groups;
  const auto& last = layers.back();
  const Eigen::Index d = last.dim();

  typename FeatureGrid<Scalar>::Tokens out(last.token_count(), d * Eigen::Index(n_groups + 1));
  for (std::size_t g = 0; g < n_groups; ++g) {
    auto block = out.middleCols(Eigen::Index(g) * d, d);
    block.setZero();
    for (std::size_t k = 0; k < per_group; ++k) block += layers[g * per_group + k].tokens();
    block /= Scalar(per_group);
  }
  out.rightCols(d) = last.tokens();
  return FeatureGrid<Scalar>(last.height(), last.width(), std::move(out));
}

/// Token sequence a1, b1, a2, b2, ... from two flattened grids.
template <typename Scalar>
TokenMatrix<Scalar> interleave(const TokenMatrix<Scalar>& a, const TokenMatrix<Scalar>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("interleave: token counts or dims differ");
  TokenMatrix<Scalar> out(2 * a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out.row(2 * i) = a.row(i);
    out.row(2 * i + 1) = b.row(i);
  }
  return out;
}

/// Inverse of interleave: even rows, odd rows.
template <typename Scalar>
std::pair<TokenMatrix<Scalar>, TokenMatrix<Scalar>> deinterleave(const TokenMatrix<Scalar>& seq) {
  if (seq.rows() % 2 != 0) throw ShapeError("deinterleave: odd token count");
  const Eigen::Index n = seq.rows() / 2;
  TokenMatrix<Scalar> a(n, seq.cols()), b(n, seq.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i) = seq.row(2 * i);
    b.row(i) = seq.row(2 * i + 1);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace vindex
