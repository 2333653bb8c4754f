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

#include "vindex/align/train.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace vindex::align {

namespace {

std::string subject_name(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "subj%02d", k + 1);
  return buf;
}

using Maps = std::vector<Eigen::Map<Eigen::VectorXd>>;

Maps flat_maps(AlignModel<double>& m) {
  Maps out;
  for (auto& v : param_views(m)) out.push_back(v.map());
  return out;
}

}  // namespace

SyntheticTask make_synthetic_task(Seed seed, const SyntheticSpec& spec) {
  if (spec.input_length <= 0 || spec.grid_height <= 0 || spec.grid_width <= 0 || spec.dim <= 0 ||
      spec.subjects <= 0 || spec.samples_per_subject <= 0)
    throw ValidationError("synthetic task: dimensions must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw ValidationError("synthetic task: noise sigma must be >= 0");
  SyntheticTask task;
  task.spec = spec;
  const RandomStream root(seed);
  const Eigen::Index L = spec.input_length, N = spec.grid_height * spec.grid_width, D = spec.dim;
  const double w_scale = 1.0 / std::sqrt(double(L));
  for (int k = 0; k < spec.subjects; ++k) {
    const auto id = subject_name(k);
    auto rw = root.split("map", std::uint64_t(k));
    Eigen::MatrixXd W(N * D, L);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = w_scale * rw.normal();
    auto rs = root.split("samples", std::uint64_t(k));
    for (int n = 0; n < spec.samples_per_subject; ++n) {
      Eigen::VectorXd s(L);
      for (Eigen::Index i = 0; i < L; ++i) s[i] = rs.normal();
      Eigen::VectorXd y = (W * s).array().tanh().matrix();
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += spec.noise_sigma * rs.normal();
      task.targets.emplace_back(spec.grid_height, spec.grid_width, Eigen::Map<const Mat<double>>(y.data(), N, D));
      task.signals.emplace_back(std::move(s), id);
    }
    task.hidden_maps.emplace(id, std::move(W));
  }
  return task;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n) {
  if (n < 1) throw ValidationError("gauss_hermite: n must be >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const Eigen::VectorXd w = std::sqrt(std::numbers::pi) * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

double generator_std(const SyntheticTask& task) {
  const auto [x, w] = gauss_hermite(64);
  double acc = 0.0;
  std::size_t rows = 0;
  for (const auto& [id, W] : task.hidden_maps) {
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      const double sd = W.row(r).norm();
      double e = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double t = std::tanh(std::sqrt(2.0) * sd * x[i]);
        e += w[i] * t * t;
      }
      acc += e / std::sqrt(std::numbers::pi);
      ++rows;
    }
  }
  return std::sqrt(acc / double(rows) + task.spec.noise_sigma * task.spec.noise_sigma);
}

void TrainConfig::validate() const {
  if (!(beta >= 0.0)) throw ValidationError("train config: beta must be >= 0");
  if (!(lr_max > 0.0)) throw ValidationError("train config: lr_max must be > 0");
  if (steps < 0) throw ValidationError("train config: steps must be >= 0");
  if (batch_size <= 0) throw ValidationError("train config: batch_size must be > 0");
  if (!(mask_ratio > 0.0 && mask_ratio < 1.0)) throw ValidationError("train config: mask_ratio must lie in (0, 1)");
  if (timesteps < 1) throw ValidationError("train config: timesteps must be >= 1");
  if (encoder_hidden <= 0) throw ValidationError("train config: encoder_hidden must be > 0");
  if (denoiser.depth < 0 || denoiser.width <= 0 || denoiser.time_dim <= 0)
    throw ValidationError("train config: invalid denoiser dimensions");
  if (!(adamw.beta1 >= 0.0 && adamw.beta1 < 1.0 && adamw.beta2 >= 0.0 && adamw.beta2 < 1.0))
    throw ValidationError("train config: AdamW betas must lie in [0, 1)");
  if (!(adamw.weight_decay >= 0.0)) throw ValidationError("train config: weight_decay must be >= 0");
}

AlignModel<double> init_model(const SyntheticTask& task, const TrainConfig& config) {
  BrainEncoderConfig ec;
  for (const auto& [id, W] : task.hidden_maps) ec.subjects.emplace(id, W.cols());
  ec.hidden = config.encoder_hidden;
  ec.grid_height = task.spec.grid_height;
  ec.grid_width = task.spec.grid_width;
  ec.dim = task.spec.dim;
  DenoiserConfig dc = config.denoiser;
  dc.tokens = ec.tokens();
  dc.dim = ec.dim;
  const RandomStream root = RandomStream(Seed{config.seed}).split("init");
  return {BrainEncoder<double>::init(ec, root.split("encoder")), Denoiser<double>::init(dc, root.split("denoiser"))};
}

TrainResult train(const SyntheticTask& task, const TrainConfig& config) {
  config.validate();
  if (task.size() == 0) throw EmptyCorpus("train: empty task");
  TrainResult result{{}, init_model(task, config)};
  auto& model = result.model;
  AlignModel<double> grad = model.zeros_like();
  Maps params = flat_maps(model);
  Maps grads = flat_maps(grad);
  AdamWState state;
  const NoiseSchedule schedule = cosine_schedule(config.timesteps);
  const RandomStream root(Seed{config.seed});
  const Eigen::Index N = model.encoder.config().tokens(), D = model.encoder.config().dim;
  const auto B = std::size_t(config.batch_size);

  AlignBatch<double> batch;
  batch.targets.resize(Eigen::Index(B) * N, D);
  for (long step = 0; step < config.steps; ++step) {
    auto rb = root.split("batch", std::uint64_t(step));
    batch.signals.clear();
    for (std::size_t i = 0; i < B; ++i) {
      const auto idx = std::size_t(rb.below(task.size()));
      batch.signals.push_back(task.signals[idx]);
      batch.targets.middleRows(Eigen::Index(i) * N, N) = task.targets[idx].tokens();
    }
    if (config.beta > 0.0) {
      auto rn = root.split("noise", std::uint64_t(step));
      batch.t.assign(B, 0);
      if (config.stratified_timesteps) {
        std::vector<std::size_t> perm(B);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = B; i > 1; --i) std::swap(perm[i - 1], perm[std::size_t(rn.below(i))]);
        for (std::size_t i = 0; i < B; ++i) {
          const double lo = double(perm[i]) * config.timesteps / double(B);
          const double hi = double(perm[i] + 1) * config.timesteps / double(B);
          const int t = 1 + int(std::floor(lo + rn.uniform() * (hi - lo)));
          batch.t[i] = std::min(t, config.timesteps);
        }
      } else {
        for (auto& t : batch.t) t = 1 + int(rn.below(std::uint64_t(config.timesteps)));
      }
      batch.eps.resize(Eigen::Index(B) * N, D);
      for (Eigen::Index i = 0; i < batch.eps.size(); ++i) batch.eps.data()[i] = rn.normal();
      batch.mask.clear();
      for (std::size_t i = 0; i < B; ++i) {
        const auto m = sample_mask(std::size_t(N), config.mask_ratio, rn);
        batch.mask.insert(batch.mask.end(), m.flags.begin(), m.flags.end());
      }
    }

    for (auto& g : grads) g.setZero();
    const auto parts = evaluate(model, batch, config.beta, schedule, &grad);
    if (!std::isfinite(parts.total)) throw DivergenceError(std::size_t(step));
    const double lr = one_cycle_lr(step, config.steps, config.lr_max);
    result.history.steps.push_back({parts.regression, parts.denoise, parts.total, lr});
    adamw_step(params, grads, state, lr, config.adamw);
  }
  return result;
}

double late_window_variance(const TrainHistory& history, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("late_window_variance: fraction must lie in (0, 1]");
  const std::size_t n = history.steps.size();
  const auto k = std::size_t(std::ceil(fraction * double(n)));
  if (k == 0) throw EmptyCorpus("late_window_variance: empty history");
  double mean = 0.0;
  for (std::size_t i = n - k; i < n; ++i) mean += history.steps[i].total;
  mean /= double(k);
  double var = 0.0;
  for (std::size_t i = n - k; i < n; ++i) var += (history.steps[i].total - mean) * (history.steps[i].total - mean);
  return var / double(k);
}

GradCheckReport gradient_check(Seed seed, double h, double beta) {
  SyntheticSpec spec;
  spec.input_length = 6;
  spec.grid_height = 4;
  spec.grid_width = 4;
  spec.dim = 8;
  spec.subjects = 2;
  spec.samples_per_subject = 1;
  const SyntheticTask task = make_synthetic_task(seed, spec);

  TrainConfig config;
  config.seed = seed.value;
  config.encoder_hidden = 12;
  config.denoiser.depth = 1;
  config.denoiser.width = 32;
  config.denoiser.time_dim = 16;
  config.denoiser.identity_blocks = false;
  AlignModel<double> model = init_model(task, config);

  const RandomStream root = RandomStream(seed).split("gradcheck");
  auto rn = root.split("noise");
  AlignBatch<double> batch;
  const Eigen::Index N = 16, D = 8;
  batch.signals = task.signals;
  batch.targets.resize(2 * N, D);
  for (Eigen::Index s = 0; s < 2; ++s) batch.targets.middleRows(s * N, N) = task.targets[std::size_t(s)].tokens();
  batch.t = {37, 640};
  batch.eps.resize(2 * N, D);
  for (Eigen::Index i = 0; i < batch.eps.size(); ++i) batch.eps.data()[i] = rn.normal();
  for (int s = 0; s < 2; ++s) {
    const auto m = sample_mask(std::size_t(N), 0.5, rn);
    batch.mask.insert(batch.mask.end(), m.flags.begin(), m.flags.end());
  }
  const NoiseSchedule schedule = cosine_schedule(1000);

  AlignModel<double> grad = model.zeros_like();
  evaluate(model, batch, beta, schedule, &grad);
  auto pv = param_views(model);
  auto gv = param_views(grad);

  GradCheckReport report;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    GradCheckEntry e{pv[k].name, pv[k].size, 0.0};
    for (Eigen::Index i = 0; i < pv[k].size; ++i) {
      double& p = pv[k].data[i];
      const double saved = p;
      p = saved + h;
      const double up = evaluate(model, batch, beta, schedule).total;
      p = saved - h;
      const double down = evaluate(model, batch, beta, schedule).total;
      p = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = gv[k].data[i];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      e.max_rel_error = std::max(e.max_rel_error, rel);
      ++report.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, e.max_rel_error);
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace vindex::align
