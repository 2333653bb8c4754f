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

// Dense layers with explicit backward passes. Activations are row-major
// (one row per sample or token); weights are (out x in).

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "vindex/core.hpp"
#include "vindex/random.hpp"

namespace vindex::align {

template <typename Scalar>
using Mat = TokenMatrix<Scalar>;
template <typename Scalar>
using Weights = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;

/// Flat view of one parameter tensor.
template <typename Scalar>
struct ParamView {
  std::string name;
  Scalar* data;
  Eigen::Index size;

  auto map() { return Eigen::Map<Vec<Scalar>>(data, size); }
};

template <std::floating_point Scalar>
Scalar silu(Scalar x) {
  return x / (Scalar(1) + std::exp(-x));
}

template <std::floating_point Scalar>
Scalar silu_grad(Scalar x) {
  const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-x));
  return s * (Scalar(1) + x * (Scalar(1) - s));
}

template <typename Derived>
auto silu(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) { return silu(v); });
}

template <typename Derived>
auto silu_grad(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.unaryExpr([](S v) { return silu_grad(v); });
}

template <typename Scalar>
struct Linear {
  Weights<Scalar> weight;  // out x in
  Vec<Scalar> bias;        // out

  Linear() = default;
  Linear(Eigen::Index in, Eigen::Index out) : weight(Weights<Scalar>::Zero(out, in)), bias(Vec<Scalar>::Zero(out)) {}

  /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weight and bias.
  static Linear uniform(Eigen::Index in, Eigen::Index out, RandomStream& rng, Scalar gain = Scalar(1)) {
    Linear l(in, out);
    const Scalar bound = gain / std::sqrt(Scalar(in));
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = bound * Scalar(2 * rng.uniform() - 1);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = bound * Scalar(2 * rng.uniform() - 1);
    return l;
  }

  Eigen::Index in() const { return weight.cols(); }
  Eigen::Index out() const { return weight.rows(); }

  Mat<Scalar> forward(const Mat<Scalar>& x) const {
    Mat<Scalar> y = x * weight.transpose();
    y.rowwise() += bias.transpose();
    return y;
  }

  /// Accumulates into grad and returns dL/dx.
  Mat<Scalar> backward(const Mat<Scalar>& x, const Mat<Scalar>& dy, Linear& grad) const {
    grad.weight.noalias() += dy.transpose() * x;
    grad.bias += dy.colwise().sum().transpose();
    return dy * weight;
  }

  /// Parameter gradient only.
  void accumulate(const Mat<Scalar>& x, const Mat<Scalar>& dy, Linear& grad) const {
    grad.weight.noalias() += dy.transpose() * x;
    grad.bias += dy.colwise().sum().transpose();
  }

  Linear zeros_like() const { return Linear(in(), out()); }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(ParamView<Scalar>{prefix + ".weight", weight.data(), weight.size()});
    f(ParamView<Scalar>{prefix + ".bias", bias.data(), bias.size()});
  }
};

/// Per-row layer normalization with gain and bias.
template <typename Scalar>
struct LayerNorm {
  Vec<Scalar> gain;
  Vec<Scalar> bias;
  Scalar eps = Scalar(1e-6);

  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index n) : gain(Vec<Scalar>::Ones(n)), bias(Vec<Scalar>::Zero(n)) {}

  struct Cache {
    Mat<Scalar> xhat;
    Vec<Scalar> rstd;
  };

  Mat<Scalar> forward(const Mat<Scalar>& x, Cache& cache) const {
    const Eigen::Index n = x.cols();
    const Vec<Scalar> mean = x.rowwise().mean();
    cache.xhat = x.colwise() - mean;
    cache.rstd = (cache.xhat.array().square().rowwise().sum() / Scalar(n) + eps).rsqrt().matrix();
    cache.xhat = cache.rstd.asDiagonal() * cache.xhat;
    Mat<Scalar> y = cache.xhat * gain.asDiagonal();
    y.rowwise() += bias.transpose();
    return y;
  }

  Mat<Scalar> backward(const Cache& cache, const Mat<Scalar>& dy, LayerNorm& grad) const {
    const Eigen::Index n = dy.cols();
    grad.gain += (dy.array() * cache.xhat.array()).colwise().sum().transpose().matrix();
    grad.bias += dy.colwise().sum().transpose();
    const Mat<Scalar> dxhat = dy * gain.asDiagonal();
    const Vec<Scalar> mean_dxhat = dxhat.rowwise().sum() / Scalar(n);
    const Vec<Scalar> mean_dxhat_xhat = (dxhat.array() * cache.xhat.array()).rowwise().sum().matrix() / Scalar(n);
    Mat<Scalar> dx = dxhat;
    dx.colwise() -= mean_dxhat;
    dx -= mean_dxhat_xhat.asDiagonal() * cache.xhat;
    return cache.rstd.asDiagonal() * dx;
  }

  LayerNorm zeros_like() const {
    LayerNorm g(gain.size());
    g.gain.setZero();
    g.eps = eps;
    return g;
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(ParamView<Scalar>{prefix + ".gain", gain.data(), gain.size()});
    f(ParamView<Scalar>{prefix + ".bias", bias.data(), bias.size()});
  }
};

/// Sinusoidal embedding of a scalar position: columns 2k, 2k+1 hold
/// sin(p * f_k), cos(p * f_k) with f_k = 10000^(-2k/dim).
template <typename Scalar>
Vec<Scalar> sinusoidal_embedding(Scalar position, Eigen::Index dim) {
  Vec<Scalar> e(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index k = j / 2;
    const Scalar freq = std::pow(Scalar(10000), -Scalar(2 * k) / Scalar(dim));
    e[j] = (j % 2 == 0) ? std::sin(position * freq) : std::cos(position * freq);
  }
  return e;
}

/// Row i is the sinusoidal embedding of token index i.
template <typename Scalar>
Mat<Scalar> positional_table(Eigen::Index tokens, Eigen::Index dim) {
  Mat<Scalar> p(tokens, dim);
  for (Eigen::Index i = 0; i < tokens; ++i) p.row(i) = sinusoidal_embedding(Scalar(i), dim).transpose();
  return p;
}

/// Collects flat views over every parameter of a model.
template <typename Model>
auto param_views(Model& m) {
  using Scalar = typename Model::scalar_type;
  std::vector<ParamView<Scalar>> views;
  m.visit([&](ParamView<Scalar> v) { views.push_back(std::move(v)); });
  return views;
}

}  // namespace vindex::align
