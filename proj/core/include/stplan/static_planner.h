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

// Offline planner for requests whose size and lifespan are known ahead of
// time. The pipeline is
//
//   1. group requests by (allocation phase, free phase) and pack each group
//      contiguously into a local plan;
//   2. fuse phase-adjacent local plans while fusion lowers the idle
//      space-time area (time-memory product);
//   3. group local plans by height and build time-shared memory layers,
//      largest height first, reusing temporal gaps of larger layers;
//   4. stack the layers on top of the persistent block.

#ifndef STPLAN_STATIC_PLANNER_H_
#define STPLAN_STATIC_PLANNER_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stplan/model.h"

namespace stplan {

struct HomoPhaseGroup {
  PhaseId p_s;
  PhaseId p_e;
  std::vector<MemoryRequestEvent> members;  // sorted by (t_s, id)
};

/// A packed group. Decision addresses are relative to the plan's base.
struct LocalPlan {
  std::vector<AllocationDecision> decisions;
  Bytes height = 0;
  Timestamp t_s = 0;
  Timestamp t_e = 0;
  double tmp = 0.0;
  PhaseId p_s;
  PhaseId p_e;
  bool fused = false;

  bool empty() const { return decisions.empty(); }
  RequestId min_id() const;
  /// Recomputes height, t_s, t_e and tmp from the decisions.
  void Refresh();
};

struct LayerSlot {
  Timestamp t_s = 0;
  Timestamp t_e = 0;
  std::size_t item = 0;  // index into the caller's input list

  friend bool operator==(const LayerSlot&, const LayerSlot&) = default;
};

/// An address band of fixed size shared over time by temporally disjoint
/// occupants.
struct MemoryLayer {
  Bytes size = 0;
  std::vector<LayerSlot> slots;  // sorted by t_s, pairwise disjoint
  Timestamp end = 0;             // t_e of the last occupant

  /// Unoccupied time spans within [0, horizon).
  std::vector<std::pair<Timestamp, Timestamp>> Gaps(Timestamp horizon) const;
};

struct PlacedLayer {
  Bytes base = 0;
  MemoryLayer layer;
};

struct StaticPlan {
  Bytes pool_size = 0;
  Bytes alignment = kDefaultAlignment;
  std::vector<AllocationDecision> decisions;  // absolute, sorted by (t_s, id)
  std::vector<PlacedLayer> layers;            // bottom-up; empty when loaded
};

struct PlannerOptions {
  bool fusion = true;
  bool gap_insert = true;
  // Also lay out the unfused groups and keep whichever pool is smaller.
  bool fusion_guard = true;
  // Events with t_e >= horizon are persistent and packed at the bottom.
  std::optional<Timestamp> horizon;
  Bytes alignment = kDefaultAlignment;
};

/// Space-time areas of one accepted or rejected fusion.
struct FusionRecord {
  long double larger_used = 0, larger_reserved = 0;
  long double smaller_used = 0, smaller_reserved = 0;
  long double fused_used = 0, fused_reserved = 0;
  double fused_tmp = 0.0;
  double weighted_tmp = 0.0;
  bool accepted = false;
};

struct PlannerStats {
  std::size_t static_events = 0;
  std::size_t persistent_events = 0;
  std::size_t phase_groups = 0;
  std::size_t fusion_accepted = 0;
  std::size_t fusion_rejected = 0;
  bool fusion_kept = false;  // the emitted plan uses the fused groups
  std::size_t dissolved_groups = 0;
  std::size_t layer_items = 0;
  std::size_t size_classes = 0;
  std::size_t gap_inserted = 0;
  std::size_t layers = 0;
  double wall_ms = 0.0;
  std::vector<FusionRecord> fusions;  // accepted ones only
};

std::vector<HomoPhaseGroup> GroupByPhase(
    std::span<const MemoryRequestEvent> events);

/// Stacks members contiguously in allocation order.
LocalPlan PackGroup(const HomoPhaseGroup& group);

/// used space-time / (height * group duration). Throws on a zero-duration
/// or zero-height plan.
double ComputeTmp(const LocalPlan& plan);

/// Inserts `smaller` into `larger` walking addresses upward; returns the
/// fused plan iff its TMP beats the space-time-weighted average of the
/// inputs. `record`, when given, receives the areas either way.
std::optional<LocalPlan> TryFuse(const LocalPlan& larger,
                                 const LocalPlan& smaller,
                                 FusionRecord* record = nullptr);

struct LayerInput {
  Timestamp t_s = 0;
  Timestamp t_e = 0;
  RequestId id = 0;  // tie-break
};

/// Greedy layer construction for same-size items: in start order, each
/// item joins the layer whose last occupant ends latest without
/// overlapping it, or opens a new layer.
std::vector<MemoryLayer> BuildLayersForSize(Bytes size,
                                            std::span<const LayerInput> items);

StaticPlan SynthesizeStaticPlan(std::span<const MemoryRequestEvent> events,
                                const PlannerOptions& options = {},
                                PlannerStats* stats = nullptr);

/// Plans the static subset of `trace`, with the trace horizon.
StaticPlan PlanTrace(const Trace& trace, PlannerOptions options = {},
                     PlannerStats* stats = nullptr);

struct PlanValidation {
  std::vector<std::pair<RequestId, RequestId>> conflicts;
  std::vector<RequestId> out_of_pool;

  bool ok() const { return conflicts.empty() && out_of_pool.empty(); }
};

/// Sweep over time with an address index; reports every pair of decisions
/// that are live together on overlapping addresses.
PlanValidation ValidatePlan(const StaticPlan& plan);

}  // namespace stplan

#endif  // STPLAN_STATIC_PLANNER_H_
