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

// Three-option salient question answering: item validation, free-form answer
// parsing and accuracy scoring.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vindex/errors.hpp"

namespace vindex {

struct QAItem {
  static constexpr std::size_t kOptions = 3;

  std::string id;
  std::string question;
  std::array<std::string, kOptions> options;
  std::size_t correct_index = 0;
  bool is_hallucination_probe = false;
};

struct ValidatedQASet {
  std::vector<QAItem> items;
  std::size_t present = 0;
  std::size_t probes = 0;
  std::vector<std::string> warnings;
};

/// Throws ValidationError on an item with an out-of-range key or an empty option.
/// Unequal probe/present counts only produce a warning.
ValidatedQASet validate_qa_set(std::vector<QAItem> items);

/// Option index chosen by a free-form response, or nullopt when it cannot be decided.
///
/// A leading option letter wins ("B", "c) ...", "(A) ..."). Otherwise a single
/// isolated marker elsewhere counts: an uppercase A/B/C token, or a lowercase one
/// written as a marker ("(b)", "b)", "b:") or closing the response ("... is c.").
/// Failing that, the response must contain exactly one option text after
/// normalization (the longest wins when one option text contains another).
std::optional<std::size_t> parse_choice(std::string_view response,
                                        std::span<const std::string> options);

struct SQAScore {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::optional<double> present_accuracy;
  std::optional<double> probe_accuracy;
};

/// responses[i] is the parsed choice for items[i]; nullopt scores as incorrect.
SQAScore score(std::span<const QAItem> items, std::span<const std::optional<std::size_t>> responses);

}  // namespace vindex
