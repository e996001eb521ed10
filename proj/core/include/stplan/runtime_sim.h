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

// Replays a trace through the hybrid runtime: static requests take their
// planned address, dynamic requests are placed inside the reusable space
// of their layer group, and anything else goes to a caching allocator
// mapped above the static pool.

#ifndef STPLAN_RUNTIME_SIM_H_
#define STPLAN_RUNTIME_SIM_H_

#include <optional>
#include <unordered_map>

#include "stplan/caching_allocator.h"
#include "stplan/dynamic_space.h"
#include "stplan/interval_set.h"
#include "stplan/report.h"
#include "stplan/static_planner.h"

namespace stplan {

struct SimOptions {
  bool reuse = true;
  Bytes fallback_min_segment = kDefaultMinSegment;
};

/// Free and occupied addresses of the static pool.
struct PoolState {
  explicit PoolState(Bytes pool_size);

  /// Marks `interval` live for `id`; false if any byte of it is taken.
  bool Take(RequestId id, Interval interval);
  /// Returns the interval that `id` held; throws if `id` is not live.
  Interval Release(RequestId id);

  Bytes pool_size = 0;
  IntervalSet free;  // 𝒜_a
  std::unordered_map<RequestId, Interval> live;
};

/// Best fit inside (free ∩ reusable space of `key`), allocated at the low
/// end of the chosen interval. nullopt means the request must fall back,
/// including when `key` has no reuse entry.
std::optional<Bytes> DynamicAllocate(PoolState& state, const ReuseMap& reuse,
                                     const HomoLayerGroupKey& key, RequestId id,
                                     Bytes size);

SimResult Simulate(const Trace& trace, const StaticPlan& plan, const ReuseMap& reuse,
                   const SimOptions& options = {});

}  // namespace stplan

#endif  // STPLAN_RUNTIME_SIM_H_
