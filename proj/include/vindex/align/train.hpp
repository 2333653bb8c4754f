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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vindex/align/objective.hpp"

namespace vindex::align {

struct SyntheticSpec {
  Eigen::Index input_length = 32;  // L_s, shared by all subjects
  Eigen::Index grid_height = 4;
  Eigen::Index grid_width = 4;
  Eigen::Index dim = 8;
  int subjects = 2;
  int samples_per_subject = 256;
  double noise_sigma = 0.05;
};

/// Samples s ~ N(0, I_L) and targets tanh(W_subject s) + noise_sigma * xi, with
/// W_subject entries ~ N(0, 1/L) fixed per subject. Subjects are named "subj01", ...
struct SyntheticTask {
  SyntheticSpec spec;
  std::map<std::string, Eigen::MatrixXd> hidden_maps;  // (tokens*dim) x L
  std::vector<BrainSignal<double>> signals;
  std::vector<FeatureGridd> targets;

  std::size_t size() const noexcept { return signals.size(); }
};

SyntheticTask make_synthetic_task(Seed seed, const SyntheticSpec& spec = {});

/// Population std of a target element given the task's hidden maps: element r has
/// pre-activation ~ N(0, |w_r|^2), so Var = mean_r E[tanh^2] + sigma^2, evaluated
/// by Gauss-Hermite quadrature.
double generator_std(const SyntheticTask& task);

/// Nodes and weights of n-point Gauss-Hermite quadrature (weight exp(-x^2)).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n);

struct TrainConfig {
  double beta = 1.0;
  double lr_max = 3e-4;
  AdamWConfig adamw{};
  long steps = 2000;
  int batch_size = 32;
  double mask_ratio = 0.5;
  std::uint64_t seed = 0;
  int timesteps = 1000;
  Eigen::Index encoder_hidden = 64;
  DenoiserConfig denoiser{};
  /// One timestep per equal-width stratum of {1..T}, strata shuffled over the batch.
  bool stratified_timesteps = true;

  void validate() const;
};

struct StepRecord {
  double regression = 0;
  std::optional<double> denoise;
  double total = 0;
  double lr = 0;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
};

struct TrainResult {
  TrainHistory history;
  AlignModel<double> model;
};

/// Builds the initial model for a task (denoiser token/dim fields are taken from the task).
AlignModel<double> init_model(const SyntheticTask& task, const TrainConfig& config);

/// Deterministic per (task, config). Throws DivergenceError on a non-finite loss.
TrainResult train(const SyntheticTask& task, const TrainConfig& config);

/// Population variance of total loss over the final `fraction` of steps.
double late_window_variance(const TrainHistory& history, double fraction = 0.2);

struct GradCheckEntry {
  std::string name;
  Eigen::Index size = 0;
  double max_rel_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0;
  double tolerance = 1e-4;
  std::size_t checked = 0;

  bool passed() const { return max_rel_error < tolerance; }
};

/// Central differences (step h) against the analytic gradient of L_R + beta*L_D on the
/// toy configuration: tokens 16, dim 8, depth 1, width 32, random (non-identity) blocks.
GradCheckReport gradient_check(Seed seed, double h = 1e-5, double beta = 1.0);

}  // namespace vindex::align
