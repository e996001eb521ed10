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

#include "stplan/runtime_sim.h"

#include <deque>
#include <map>

#include "stplan/error.h"

namespace stplan {

PoolState::PoolState(Bytes size) : pool_size(size) {
  if (size > 0) free = IntervalSet(Interval{0, size});
}

bool PoolState::Take(RequestId id, Interval interval) {
  if (!free.ContainsInterval(interval)) return false;
  if (!live.emplace(id, interval).second) return false;
  free.Remove(interval);
  return true;
}

Interval PoolState::Release(RequestId id) {
  auto it = live.find(id);
  if (it == live.end()) {
    throw ValidationError("free of request " + std::to_string(id) +
                          " that is not live in the pool");
  }
  Interval interval = it->second;
  live.erase(it);
  free.Insert(interval);
  return interval;
}

std::optional<Bytes> DynamicAllocate(PoolState& state, const ReuseMap& reuse,
                                     const HomoLayerGroupKey& key, RequestId id,
                                     Bytes size) {
  auto it = reuse.find(key);
  if (it == reuse.end() || it->second.reusable.empty()) return std::nullopt;
  IntervalSet candidates = Intersect(state.free, it->second.reusable);
  std::optional<Interval> fit = BestFit(candidates, size);
  if (!fit) return std::nullopt;
  if (!state.Take(id, {fit->lo, fit->lo + size})) {
    throw InternalError("candidate interval was not free");
  }
  return fit->lo;
}

SimResult Simulate(const Trace& trace, const StaticPlan& plan, const ReuseMap& reuse,
                   const SimOptions& options) {
  // Planned addresses per (allocation phase, size), in plan order.
  std::map<std::pair<PhaseId, Bytes>, std::deque<Bytes>> queues;
  for (const auto& d : plan.decisions) {
    queues[{d.event.p_s, d.event.size}].push_back(d.addr);
  }

  PoolState pool(plan.pool_size);
  CachingAllocator fallback(plan.pool_size, options.fallback_min_segment,
                            plan.alignment);
  std::unordered_map<RequestId, Route> routes;
  SimResult result;
  auto& log = result.log;

  auto to_fallback = [&](Timestamp t, const MemoryRequestEvent& e, bool mismatch) {
    auto placement = fallback.Allocate(e.id, e.size);
    if (placement.reserved > 0) {
      log.push_back({t, LogOp::kReserve, e.id,
                     plan.pool_size + fallback.reserved() - placement.reserved,
                     placement.reserved, Route::kFallback});
    }
    log.push_back({t, LogOp::kAlloc, e.id, placement.addr, e.size, Route::kFallback,
                   mismatch});
    routes[e.id] = Route::kFallback;
  };

  for (const ReplayOp& op : ReplayOrder(trace)) {
    const MemoryRequestEvent& e = trace.events[op.event];
    if (op.free) {
      auto it = routes.find(e.id);
      if (it == routes.end()) {
        throw ValidationError("free of unknown request " + std::to_string(e.id));
      }
      Bytes addr = 0;
      if (it->second == Route::kFallback) {
        addr = fallback.Free(e.id).addr;
      } else {
        addr = pool.Release(e.id).lo;
      }
      log.push_back({op.t, LogOp::kFree, e.id, addr, e.size, it->second});
      routes.erase(it);
      continue;
    }
    if (routes.contains(e.id)) {
      throw ValidationError("request " + std::to_string(e.id) + " allocated twice");
    }

    if (!e.dynamic) {
      auto q = queues.find({e.p_s, e.size});
      if (q == queues.end() || q->second.empty()) {
        to_fallback(op.t, e, true);
        continue;
      }
      const Bytes addr = q->second.front();
      q->second.pop_front();
      if (!pool.Take(e.id, {addr, addr + e.size})) {
        throw InternalError("planned address " + std::to_string(addr) +
                            " for request " + std::to_string(e.id) +
                            " is occupied");
      }
      log.push_back({op.t, LogOp::kAlloc, e.id, addr, e.size, Route::kStatic});
      routes[e.id] = Route::kStatic;
      continue;
    }

    std::optional<Bytes> addr;
    if (options.reuse && e.l_s && e.l_e) {
      addr = DynamicAllocate(pool, reuse, {*e.l_s, *e.l_e}, e.id, e.size);
    }
    if (!addr) {
      to_fallback(op.t, e, false);
      continue;
    }
    log.push_back({op.t, LogOp::kAlloc, e.id, *addr, e.size, Route::kDynamic});
    routes[e.id] = Route::kDynamic;
  }

  result.report = ComputeMetrics(log, plan.pool_size,
                                 options.reuse ? "planner" : "planner-no-reuse");
  return result;
}

}  // namespace stplan
