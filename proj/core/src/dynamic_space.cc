// Copyright 2026 The stplan Authors.
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

#include "stplan/dynamic_space.h"

#include <algorithm>
#include <limits>

#include "stplan/error.h"

namespace stplan {

std::map<HomoLayerGroupKey, std::vector<MemoryRequestEvent>> GroupDynamic(
    std::span<const MemoryRequestEvent> events) {
  std::map<HomoLayerGroupKey, std::vector<MemoryRequestEvent>> groups;
  for (const auto& e : events) {
    if (!e.l_s || !e.l_e) {
      throw ValidationError("event " + std::to_string(e.id) +
                            ": dynamic event missing layer");
    }
    groups[{*e.l_s, *e.l_e}].push_back(e);
  }
  return groups;
}

std::pair<Timestamp, Timestamp> TemporalRange(
    const HomoLayerGroupKey& key, std::span<const LayerSpan> layer_schedule) {
  Timestamp start = std::numeric_limits<Timestamp>::max();
  Timestamp end = std::numeric_limits<Timestamp>::min();
  bool have_start = false;
  bool have_end = false;
  for (const auto& layer : layer_schedule) {
    if (layer.name == key.l_s) {
      start = std::min(start, layer.start);
      have_start = true;
    }
    if (layer.name == key.l_e) {
      end = std::max(end, layer.end);
      have_end = true;
    }
  }
  if (!have_start) throw ValidationError("unknown layer '" + key.l_s + "'");
  if (!have_end) throw ValidationError("unknown layer '" + key.l_e + "'");
  if (start > end) {
    throw ValidationError("layer '" + key.l_e + "' ends before '" + key.l_s +
                          "' starts");
  }
  return {start, end};
}

ReuseSpace ComputeReusableSpace(const StaticPlan& plan,
                                const HomoLayerGroupKey& key,
                                std::span<const LayerSpan> layer_schedule) {
  auto [t_s, t_e] = TemporalRange(key, layer_schedule);
  ReuseSpace space{t_s, t_e, {}};
  if (plan.decisions.empty()) return space;

  Bytes lo = std::numeric_limits<Bytes>::max();
  Bytes hi = 0;
  std::vector<Interval> occupied;
  for (const auto& d : plan.decisions) {
    lo = std::min(lo, d.addr);
    hi = std::max(hi, d.end());
    if (LifespansOverlap(d.event.t_s, d.event.t_e, t_s, t_e)) {
      occupied.push_back({d.addr, d.end()});
    }
  }
  space.reusable = Subtract(IntervalSet(Interval{lo, hi}),
                            IntervalSet::FromUnsorted(std::move(occupied)));
  return space;
}

ReuseMap DeriveReuseMap(const Trace& trace, const StaticPlan& plan) {
  ReuseMap map;
  std::vector<MemoryRequestEvent> dynamic = DynamicEvents(trace);
  for (const auto& [key, members] : GroupDynamic(dynamic)) {
    map.emplace(key, ComputeReusableSpace(plan, key, trace.layers));
  }
  return map;
}

}  // namespace stplan
