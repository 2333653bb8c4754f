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

#include "vindex/grounding.hpp"

namespace vindex {

std::string_view to_string(SalienceCategory c) {
  switch (c) {
    case SalienceCategory::salient_creature: return "salient_creature";
    case SalienceCategory::salient_object: return "salient_object";
    case SalienceCategory::inconspicuous: return "inconspicuous";
  }
  return "unknown";
}

SalienceCategory parse_salience_category(std::string_view name) {
  if (name == "salient_creature") return SalienceCategory::salient_creature;
  if (name == "salient_object") return SalienceCategory::salient_object;
  if (name == "inconspicuous") return SalienceCategory::inconspicuous;
  throw ValidationError("unknown salience category '" + std::string(name) + "'");
}

namespace {

bool passes(double value, double m, ThresholdRule rule) {
  return rule == ThresholdRule::strict ? value > m : value >= m;
}

template <typename Pred>
GroupScore score_group(std::span<const GroundingItem> items, double m, ThresholdRule rule, Pred in_group) {
  GroupScore g;
  std::size_t hits = 0;
  double iou_sum = 0.0;
  for (const auto& it : items) {
    if (!in_group(it.category)) continue;
    const double v = it.iou();
    ++g.count;
    iou_sum += v;
    if (passes(v, m, rule)) ++hits;
  }
  if (g.count > 0) {
    g.acc = 100.0 * double(hits) / double(g.count);
    g.mean_iou = iou_sum / double(g.count);
  }
  return g;
}

}  // namespace

double acc_at(std::span<const GroundingItem> items, double m, ThresholdRule rule) {
  if (items.empty()) throw EmptyCorpus("acc_at: no grounding items");
  std::size_t hits = 0;
  for (const auto& it : items)
    if (passes(it.iou(), m, rule)) ++hits;
  return 100.0 * double(hits) / double(items.size());
}

CategoryReport category_report(std::span<const GroundingItem> items, double m, ThresholdRule rule) {
  if (items.empty()) throw EmptyCorpus("category_report: no grounding items");
  using C = SalienceCategory;
  CategoryReport r;
  r.threshold = m;
  r.all = score_group(items, m, rule, [](C) { return true; });
  r.salient = score_group(items, m, rule, [](C c) { return c != C::inconspicuous; });
  r.salient_creatures = score_group(items, m, rule, [](C c) { return c == C::salient_creature; });
  r.salient_objects = score_group(items, m, rule, [](C c) { return c == C::salient_object; });
  r.inconspicuous = score_group(items, m, rule, [](C c) { return c == C::inconspicuous; });
  return r;
}

}  // namespace vindex
