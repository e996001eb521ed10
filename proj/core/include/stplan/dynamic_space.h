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

#ifndef STPLAN_DYNAMIC_SPACE_H_
#define STPLAN_DYNAMIC_SPACE_H_

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stplan/interval_set.h"
#include "stplan/model.h"
#include "stplan/static_planner.h"

namespace stplan {

/// Dynamic requests that start in layer instance `l_s` and end in `l_e`.
struct HomoLayerGroupKey {
  std::string l_s;
  std::string l_e;

  friend auto operator<=>(const HomoLayerGroupKey&,
                          const HomoLayerGroupKey&) = default;
};

/// Pool addresses that no static decision touches during [t_s, t_e).
struct ReuseSpace {
  Timestamp t_s = 0;
  Timestamp t_e = 0;
  IntervalSet reusable;

  friend bool operator==(const ReuseSpace&, const ReuseSpace&) = default;
};

/// Keys with no reusable address keep an empty set, so "no reuse" and
/// "unknown key" stay distinguishable.
using ReuseMap = std::map<HomoLayerGroupKey, ReuseSpace>;

std::map<HomoLayerGroupKey, std::vector<MemoryRequestEvent>> GroupDynamic(
    std::span<const MemoryRequestEvent> events);

/// [start of the earliest `l_s` instance, end of the latest `l_e` instance).
std::pair<Timestamp, Timestamp> TemporalRange(
    const HomoLayerGroupKey& key, std::span<const LayerSpan> layer_schedule);

ReuseSpace ComputeReusableSpace(const StaticPlan& plan,
                                const HomoLayerGroupKey& key,
                                std::span<const LayerSpan> layer_schedule);

/// Reusable space for every group of dynamic requests in `trace`.
ReuseMap DeriveReuseMap(const Trace& trace, const StaticPlan& plan);

}  // namespace stplan

#endif  // STPLAN_DYNAMIC_SPACE_H_
