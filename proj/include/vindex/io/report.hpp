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

// Report sections, training configuration files, and canonical rendering.
// nlohmann::json keeps object keys sorted, which makes dumps canonical.

#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "vindex/align/train.hpp"
#include "vindex/caption/matching.hpp"
#include "vindex/grounding.hpp"
#include "vindex/sqa.hpp"

namespace vindex::io {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ReportFormat { json, csv };

nlohmann::json to_json(const caption::MatchReport& report, bool with_trace = true);
nlohmann::json to_json(const CategoryReport& report);
nlohmann::json to_json(const SQAScore& score);
nlohmann::json to_json(const align::GradCheckReport& report);

/// Summary numbers of a run (first/last losses, late-window variance, lr range).
nlohmann::json history_summary(const align::TrainHistory& history);

/// One line per step: step,regression,denoise,total,lr (denoise empty when absent).
std::string history_csv(const align::TrainHistory& history);

/// Pretty JSON with sorted keys and a trailing newline, or "key,value" CSV rows of
/// every scalar leaf keyed by its dotted path (array elements by index).
std::string render(const nlohmann::json& report, ReportFormat format);

/// Training configuration file.
///
/// {"seed": 0, "beta": 1.0, "lr_max": 3e-4, "steps": 2000, "batch_size": 32,
///  "mask_ratio": 0.5, "timesteps": 1000, "weight_decay": 0.01, "adam_betas": [0.9, 0.95],
///  "encoder_hidden": 64, "stratified_timesteps": true,
///  "denoiser": {"depth": 1, "width": 1024, "time_dim": 64, "identity_blocks": true},
///  "task": {"seed": <seed>, "input_length": 32, "grid_height": 4, "grid_width": 4, "dim": 8,
///           "subjects": 2, "samples_per_subject": 256, "noise_sigma": 0.05}}
///
/// Every key is optional; unknown keys are rejected with FormatError.
struct AlignRunConfig {
  align::TrainConfig train;
  align::SyntheticSpec task;
  std::optional<std::uint64_t> task_seed;  // defaults to train.seed
};

AlignRunConfig parse_align_config(const nlohmann::json& j);
nlohmann::json to_json(const AlignRunConfig& config);

}  // namespace vindex::io
