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

// Domain types shared by the planner, the simulators and the file formats.
//
// Time is logical: a timestamp is the index of a record in the profiled
// operation stream. Every lifespan and every address range is half-open.

#ifndef STPLAN_MODEL_H_
#define STPLAN_MODEL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stplan {

using Bytes = std::uint64_t;
using Timestamp = std::int64_t;
using RequestId = std::uint64_t;

inline constexpr Bytes kDefaultAlignment = 512;

constexpr Bytes AlignUp(Bytes value, Bytes alignment) {
  return alignment == 0 ? value : (value + alignment - 1) / alignment * alignment;
}

enum class PhaseKind : std::uint8_t {
  kInit,
  kForward,
  kBackward,
  kOptimizerStep,
};

/// A computation phase of one training iteration. `chunk` is the virtual
/// pipeline chunk and stays 0 when the schedule has a single chunk.
struct PhaseId {
  PhaseKind kind = PhaseKind::kInit;
  std::uint32_t microbatch = 0;
  std::uint32_t chunk = 0;

  friend auto operator<=>(const PhaseId&, const PhaseId&) = default;

  /// "init", "F:<mb>[.<chunk>]", "B:<mb>[.<chunk>]" or "opt". The chunk
  /// suffix is omitted when it is 0.
  std::string Tag() const;
  static PhaseId Parse(std::string_view tag);

  static PhaseId Init() { return {PhaseKind::kInit, 0, 0}; }
  static PhaseId Forward(std::uint32_t mb, std::uint32_t chunk = 0) {
    return {PhaseKind::kForward, mb, chunk};
  }
  static PhaseId Backward(std::uint32_t mb, std::uint32_t chunk = 0) {
    return {PhaseKind::kBackward, mb, chunk};
  }
  static PhaseId Optimizer() { return {PhaseKind::kOptimizerStep, 0, 0}; }
};

/// One paired allocation/free record.
struct MemoryRequestEvent {
  RequestId id = 0;
  Bytes size = 0;
  Timestamp t_s = 0;
  Timestamp t_e = 0;
  PhaseId p_s;
  PhaseId p_e;
  bool dynamic = false;
  // Layer instances that bracket a dynamic request; set iff `dynamic`.
  std::optional<std::string> l_s;
  std::optional<std::string> l_e;

  Timestamp duration() const { return t_e - t_s; }

  friend bool operator==(const MemoryRequestEvent&,
                         const MemoryRequestEvent&) = default;
};

struct PhaseSpan {
  PhaseId phase;
  Timestamp start = 0;
  Timestamp end = 0;

  friend bool operator==(const PhaseSpan&, const PhaseSpan&) = default;
};

/// One execution of a model layer. Names are qualified with the phase tag
/// ("layers.3@F:0") so that each microbatch's instance is distinct.
struct LayerSpan {
  std::string name;
  Timestamp start = 0;
  Timestamp end = 0;

  friend bool operator==(const LayerSpan&, const LayerSpan&) = default;
};

struct Trace {
  std::vector<MemoryRequestEvent> events;  // sorted by (t_s, id)
  std::vector<PhaseSpan> phases;           // disjoint, increasing
  std::vector<LayerSpan> layers;           // increasing start
  Timestamp horizon = 0;

  friend bool operator==(const Trace&, const Trace&) = default;

  /// Index of the phase containing `t`, or nullopt.
  std::optional<std::size_t> PhaseIndexAt(Timestamp t) const;
};

/// An event with its planned base address.
struct AllocationDecision {
  MemoryRequestEvent event;
  Bytes addr = 0;

  Bytes end() const { return addr + event.size; }

  friend bool operator==(const AllocationDecision&,
                         const AllocationDecision&) = default;
};

inline bool LifespansOverlap(Timestamp a_s, Timestamp a_e, Timestamp b_s,
                             Timestamp b_e) {
  return a_s < b_e && b_s < a_e;
}

/// Qualified layer-instance name used for `l_s` / `l_e`.
std::string LayerInstanceName(std::string_view module, const PhaseId& phase);
/// Inverse of LayerInstanceName: the module part of a qualified name.
std::string_view ModuleOfLayerInstance(std::string_view instance);

/// Peak of the summed sizes of simultaneously live events. This is the
/// allocated-memory peak M_a and a lower bound for any conflict-free pool.
Bytes CliqueLowerBound(std::span<const MemoryRequestEvent> events);
inline Bytes CliqueLowerBound(const Trace& trace) {
  return CliqueLowerBound(trace.events);
}

/// One step of replaying a trace: the allocation or the free of `event`.
struct ReplayOp {
  Timestamp t = 0;
  bool free = false;
  std::size_t event = 0;  // index into Trace::events
};

/// Allocations at t_s and frees at t_e (persistent events are never freed),
/// ordered by time with frees first, then by request id.
std::vector<ReplayOp> ReplayOrder(const Trace& trace);

/// Checks the structural invariants of a trace; throws ValidationError.
void ValidateTrace(const Trace& trace);

/// Static (d = false) and dynamic (d = true) subsets, order preserved.
std::vector<MemoryRequestEvent> StaticEvents(const Trace& trace);
std::vector<MemoryRequestEvent> DynamicEvents(const Trace& trace);

}  // namespace stplan

#endif  // STPLAN_MODEL_H_
