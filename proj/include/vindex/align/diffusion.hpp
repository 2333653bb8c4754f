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
#include <cmath>
#include <numbers>
#include <vector>

#include "vindex/core.hpp"
#include "vindex/errors.hpp"
#include "vindex/random.hpp"

namespace vindex::align {

struct NoiseSchedule {
  int T = 0;
  std::vector<double> alpha_bar;  // T + 1 entries, alpha_bar[0] == 1

  double operator[](int t) const { return alpha_bar.at(static_cast<std::size_t>(t)); }
};

/// alpha_bar_t = f(t) / f(0), f(t) = cos^2(((t/T + s) / (1 + s)) * pi/2), with each step retaining
/// at least 1e-3 of the previous value.
inline NoiseSchedule cosine_schedule(int T, double s = 0.008) {
  if (T < 1) throw ValidationError("cosine_schedule: T must be >= 1");
  auto f = [&](int t) {
    const double c = std::cos(((double(t) / T + s) / (1.0 + s)) * std::numbers::pi / 2.0);
    return c * c;
  };
  NoiseSchedule sched{T, std::vector<double>(static_cast<std::size_t>(T) + 1)};
  const double f0 = f(0);
  sched.alpha_bar[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    // Per-step retention 1 - beta_t is floored at 1e-3 so the tail stays strictly decreasing and positive.
    const double prev = sched.alpha_bar[std::size_t(t - 1)];
    sched.alpha_bar[std::size_t(t)] = std::max(f(t) / f0, prev * 1e-3);
  }
  return sched;
}

/// sqrt(abar_t) v + sqrt(1 - abar_t) eps, element-wise over any dense shape.
template <typename DerivedV, typename DerivedE>
auto corrupt(const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedE>& eps, int t,
             const NoiseSchedule& schedule) {
  using Scalar = typename DerivedV::Scalar;
  if (v.rows() != eps.rows() || v.cols() != eps.cols()) throw ShapeError("corrupt: eps shape differs from v");
  if (t < 0 || t > schedule.T) throw ValidationError("corrupt: timestep out of range");
  const Scalar a = Scalar(schedule[t]);
  return (std::sqrt(a) * v + std::sqrt(Scalar(1) - a) * eps).eval();
}

template <typename Scalar>
FeatureGrid<Scalar> corrupt(const FeatureGrid<Scalar>& v, const FeatureGrid<Scalar>& eps, int t,
                            const NoiseSchedule& schedule) {
  if (!v.same_shape(eps)) throw ShapeError("corrupt: eps shape differs from v");
  return FeatureGrid<Scalar>(v.height(), v.width(), corrupt(v.tokens(), eps.tokens(), t, schedule));
}

struct TokenMask {
  std::vector<bool> flags;
  double ratio = 0.0;

  std::size_t size() const noexcept { return flags.size(); }
  std::size_t count() const noexcept { return std::size_t(std::count(flags.begin(), flags.end(), true)); }
};

/// Exactly round(ratio * n) tokens, uniformly chosen.
inline TokenMask sample_mask(std::size_t n_tokens, double ratio, RandomStream& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("sample_mask: ratio must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(std::llround(ratio * double(n_tokens)));
  TokenMask m{std::vector<bool>(n_tokens, false), ratio};
  for (auto i : rng.choose(n_tokens, k)) m.flags[i] = true;
  return m;
}

/// Mean squared error over all elements.
template <typename DerivedB, typename DerivedV>
typename DerivedB::Scalar loss_regression(const Eigen::MatrixBase<DerivedB>& b, const Eigen::MatrixBase<DerivedV>& v) {
  if (b.rows() != v.rows() || b.cols() != v.cols()) throw ShapeError("loss_regression: shape mismatch");
  if (b.size() == 0) throw ShapeError("loss_regression: empty input");
  return (b - v).squaredNorm() / typename DerivedB::Scalar(b.size());
}

template <typename Scalar>
Scalar loss_regression(const FeatureGrid<Scalar>& b, const FeatureGrid<Scalar>& v) {
  if (!b.same_shape(v)) throw ShapeError("loss_regression: shape mismatch");
  return loss_regression(b.tokens(), v.tokens());
}

/// MSE over the rows flagged in mask (one row per token).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar loss_denoise(const Eigen::MatrixBase<DerivedA>& eps_hat, const Eigen::MatrixBase<DerivedB>& eps,
                                       const std::vector<bool>& mask) {
  using Scalar = typename DerivedA::Scalar;
  if (eps_hat.rows() != eps.rows() || eps_hat.cols() != eps.cols()) throw ShapeError("loss_denoise: shape mismatch");
  if (std::size_t(eps.rows()) != mask.size()) throw ShapeError("loss_denoise: mask length differs from token count");
  Scalar sum = 0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < eps.rows(); ++i) {
    if (!mask[std::size_t(i)]) continue;
    sum += (eps_hat.row(i) - eps.row(i)).squaredNorm();
    ++n;
  }
  if (n == 0) throw DegenerateMask("loss_denoise: mask has no masked tokens");
  return sum / Scalar(n * std::size_t(eps.cols()));
}

template <typename Scalar>
Scalar loss_denoise(const FeatureGrid<Scalar>& eps_hat, const FeatureGrid<Scalar>& eps, const TokenMask& mask) {
  if (!eps_hat.same_shape(eps)) throw ShapeError("loss_denoise: shape mismatch");
  return loss_denoise(eps_hat.tokens(), eps.tokens(), mask.flags);
}

template <typename Scalar>
Scalar total_loss(Scalar l_r, Scalar l_d, Scalar beta) {
  if (!(beta >= Scalar(0))) throw ValidationError("total_loss: beta must be >= 0");
  return l_r + beta * l_d;
}

/// Linear warmup from lr_max/25 to lr_max over the first 30% of steps, then
/// cosine anneal back to lr_max/25 at total_steps.
inline double one_cycle_lr(long step, long total_steps, double lr_max) {
  if (total_steps <= 0 || step < 0 || step > total_steps) throw ValidationError("one_cycle_lr: step out of range");
  const double floor = lr_max / 25.0;
  const double peak = 0.3 * double(total_steps);
  const double s = double(step);
  if (s <= peak) return peak == 0.0 ? lr_max : floor + (lr_max - floor) * s / peak;
  const double progress = (s - peak) / (double(total_steps) - peak);
  return floor + (lr_max - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double weight_decay = 0.01;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<Eigen::VectorXd> m, v;
  long step = 0;
};

/// Decoupled weight decay then a bias-corrected Adam step, applied to each
/// (param, grad) pair of flat buffers.
template <typename Scalar>
void adamw_step(std::vector<Eigen::Map<Eigen::Vector<Scalar, Eigen::Dynamic>>>& params,
                const std::vector<Eigen::Map<Eigen::Vector<Scalar, Eigen::Dynamic>>>& grads, AdamWState& state,
                double lr, const AdamWConfig& config = {}) {
  if (params.size() != grads.size()) throw ShapeError("adamw_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Eigen::VectorXd::Zero(p.size()));
      state.v.push_back(Eigen::VectorXd::Zero(p.size()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adamw_step: state does not match parameters");
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, double(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    const auto& g = grads[k];
    if (p.size() != g.size() || p.size() != state.m[k].size()) throw ShapeError("adamw_step: buffer size mismatch");
    const Eigen::VectorXd gd = g.template cast<double>();
    state.m[k] = config.beta1 * state.m[k] + (1.0 - config.beta1) * gd;
    state.v[k] = config.beta2 * state.v[k] + (1.0 - config.beta2) * gd.cwiseAbs2();
    const Eigen::VectorXd update =
        (state.m[k] / c1).array() / ((state.v[k] / c2).array().sqrt() + config.eps);
    Eigen::VectorXd pd = p.template cast<double>() * (1.0 - lr * config.weight_decay) - lr * update;
    p = pd.template cast<Scalar>();
  }
}

}  // namespace vindex::align
