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
#include <string>
#include <utility>

#include "vindex/errors.hpp"

namespace vindex {

template <typename Scalar>
using TokenMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An H x W grid of D-dimensional tokens, stored as an (H*W) x D row-major matrix
/// whose row index is r * W + c.
template <typename Scalar>
class FeatureGrid {
 public:
  using Tokens = TokenMatrix<Scalar>;

  FeatureGrid() = default;

  FeatureGrid(Eigen::Index height, Eigen::Index width, Tokens tokens)
      : height_(height), width_(width), tokens_(std::move(tokens)) {
    if (height_ < 0 || width_ < 0 || tokens_.rows() != height_ * width_)
      throw ShapeError("feature grid: token count does not match height*width");
    if (!tokens_.allFinite()) throw ValidationError("feature grid: non-finite value");
  }

  static FeatureGrid constant(Eigen::Index height, Eigen::Index width, Eigen::Index dim, Scalar value) {
    return FeatureGrid(height, width, Tokens::Constant(height * width, dim, value));
  }

  Eigen::Index height() const noexcept { return height_; }
  Eigen::Index width() const noexcept { return width_; }
  Eigen::Index dim() const noexcept { return tokens_.cols(); }
  Eigen::Index token_count() const noexcept { return tokens_.rows(); }

  const Tokens& tokens() const noexcept { return tokens_; }
  auto token(Eigen::Index r, Eigen::Index c) const { return tokens_.row(r * width_ + c); }

  bool same_shape(const FeatureGrid& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_ && dim() == o.dim();
  }

 private:
  Eigen::Index height_ = 0;
  Eigen::Index width_ = 0;
  Tokens tokens_;
};

using FeatureGridd = FeatureGrid<double>;

template <typename Scalar>
struct BrainSignal {
  Eigen::Vector<Scalar, Eigen::Dynamic> values;
  std::string subject_id;

  BrainSignal(Eigen::Vector<Scalar, Eigen::Dynamic> v, std::string subject)
      : values(std::move(v)), subject_id(std::move(subject)) {
    if (values.size() == 0) throw ValidationError("brain signal: empty");
    if (!values.allFinite()) throw ValidationError("brain signal: non-finite value");
  }
};

/// Corner-based axis-aligned box (x_min, y_min, x_max, y_max).
template <typename Scalar>
struct BBox {
  Scalar x_min{}, y_min{}, x_max{}, y_max{};

  BBox() = default;
  BBox(Scalar x0, Scalar y0, Scalar x1, Scalar y1) : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    if (!(x_min <= x_max) || !(y_min <= y_max))
      throw ValidationError("bbox: requires x_min <= x_max and y_min <= y_max");
  }

  Scalar area() const { return (x_max - x_min) * (y_max - y_min); }
};

using BBoxd = BBox<double>;

}  // namespace vindex
