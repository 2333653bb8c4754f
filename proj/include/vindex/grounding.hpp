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

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vindex/core.hpp"

namespace vindex {

/// Intersection over union; 0 whenever the union has zero area.
template <typename Scalar>
Scalar iou(const BBox<Scalar>& a, const BBox<Scalar>& b) {
  const Scalar iw = std::max(Scalar(0), std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const Scalar ih = std::max(Scalar(0), std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const Scalar inter = iw * ih;
  const Scalar uni = a.area() + b.area() - inter;
  if (!(uni > Scalar(0))) return Scalar(0);
  return inter / uni;
}

enum class SalienceCategory { salient_creature, salient_object, inconspicuous };

std::string_view to_string(SalienceCategory c);
/// Throws ValidationError on an unknown name.
SalienceCategory parse_salience_category(std::string_view name);

struct GroundingItem {
  std::string expression;
  BBoxd predicted;
  BBoxd reference;
  SalienceCategory category = SalienceCategory::salient_object;

  double iou() const { return vindex::iou(predicted, reference); }
};

enum class ThresholdRule { strict, inclusive };

/// Percentage of items whose IoU exceeds m (or reaches it under the inclusive rule).
double acc_at(std::span<const GroundingItem> items, double m, ThresholdRule rule = ThresholdRule::strict);

struct GroupScore {
  std::size_t count = 0;
  std::optional<double> acc;       // percentage
  std::optional<double> mean_iou;  // in [0, 1]
};

struct CategoryReport {
  double threshold = 0.5;
  GroupScore all, salient, salient_creatures, salient_objects, inconspicuous;
};

CategoryReport category_report(std::span<const GroundingItem> items, double m = 0.5,
                               ThresholdRule rule = ThresholdRule::strict);

}  // namespace vindex
