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

#include <optional>
#include <vector>

#include "vindex/align/models.hpp"

namespace vindex::align {

template <typename Scalar>
struct AlignModel {
  using scalar_type = Scalar;

  BrainEncoder<Scalar> encoder;
  Denoiser<Scalar> denoiser;

  AlignModel zeros_like() const { return {encoder.zeros_like(), denoiser.zeros_like()}; }

  template <typename F>
  void visit(F&& f) {
    encoder.visit(f);
    denoiser.visit(f);
  }
};

/// One minibatch with its diffusion draws. targets, eps: (B*tokens) x dim;
/// t: one timestep per sample; mask: one flag per token row.
template <typename Scalar>
struct AlignBatch {
  std::vector<BrainSignal<Scalar>> signals;
  Mat<Scalar> targets;
  std::vector<int> t;
  Mat<Scalar> eps;
  std::vector<bool> mask;
};

template <typename Scalar>
struct LossParts {
  Scalar regression = 0;
  std::optional<Scalar> denoise;  // absent when beta == 0 (denoiser not evaluated)
  Scalar total = 0;
};

/// L_R + beta * L_D for a batch. When grad is given, accumulates exact
/// gradients of the total into it. The denoiser is skipped entirely at beta == 0.
template <typename Scalar>
LossParts<Scalar> evaluate(const AlignModel<Scalar>& model, const AlignBatch<Scalar>& batch, Scalar beta,
                           const NoiseSchedule& schedule, AlignModel<Scalar>* grad = nullptr) {
  if (!(beta >= Scalar(0))) throw ValidationError("objective: beta must be >= 0");
  const auto& ec = model.encoder.config();
  const Eigen::Index B = Eigen::Index(batch.signals.size());
  const Eigen::Index N = ec.tokens(), D = ec.dim;
  if (batch.targets.rows() != B * N || batch.targets.cols() != D) throw ShapeError("objective: target shape");

  typename BrainEncoder<Scalar>::Cache enc_cache;
  const Mat<Scalar> y = model.encoder.forward(batch.signals, enc_cache);
  const Eigen::Map<const Mat<Scalar>> b(y.data(), B * N, D);

  LossParts<Scalar> out;
  out.regression = loss_regression(b, batch.targets);
  Mat<Scalar> db;
  if (grad) db = (Scalar(2) / Scalar(b.size())) * (b - batch.targets);

  if (beta > Scalar(0)) {
    if (Eigen::Index(batch.t.size()) != B) throw ShapeError("objective: one timestep per sample required");
    if (batch.eps.rows() != B * N || batch.eps.cols() != D) throw ShapeError("objective: eps shape");
    Mat<Scalar> v_t(B * N, D);
    for (Eigen::Index s = 0; s < B; ++s)
      v_t.middleRows(s * N, N) =
          corrupt(batch.targets.middleRows(s * N, N), batch.eps.middleRows(s * N, N), batch.t[std::size_t(s)], schedule);
    typename Denoiser<Scalar>::Cache den_cache;
    const Mat<Scalar> b_mat = b;
    const Mat<Scalar> eps_hat = model.denoiser.forward(v_t, b_mat, batch.t, batch.mask, den_cache);
    const Scalar l_d = loss_denoise(eps_hat, batch.eps, batch.mask);
    out.denoise = l_d;
    out.total = total_loss(out.regression, l_d, beta);
    if (grad) {
      const Scalar n_masked = Scalar(std::count(batch.mask.begin(), batch.mask.end(), true));
      Mat<Scalar> d_eps_hat = Mat<Scalar>::Zero(eps_hat.rows(), eps_hat.cols());
      const Scalar scale = beta * Scalar(2) / (n_masked * Scalar(D));
      for (Eigen::Index i = 0; i < eps_hat.rows(); ++i)
        if (batch.mask[std::size_t(i)]) d_eps_hat.row(i) = scale * (eps_hat.row(i) - batch.eps.row(i));
      db += model.denoiser.backward(den_cache, d_eps_hat, grad->denoiser);
    }
  } else {
    out.total = out.regression;
  }

  if (grad) {
    const Mat<Scalar> dy = Eigen::Map<const Mat<Scalar>>(db.data(), B, N * D);
    model.encoder.backward(enc_cache, dy, grad->encoder);
  }
  return out;
}

}  // namespace vindex::align
