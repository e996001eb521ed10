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

#include "stplan/static_planner.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "stplan/error.h"

namespace stplan {

namespace {

using u128 = unsigned __int128;

// Used and reserved space-time area of a local plan.
struct Areas {
  u128 used = 0;
  u128 reserved = 0;
};

Areas AreasOf(const LocalPlan& plan) {
  Areas areas;
  for (const auto& d : plan.decisions) {
    areas.used += static_cast<u128>(d.event.size) *
                  static_cast<u128>(d.event.duration());
  }
  areas.reserved = static_cast<u128>(plan.height) *
                   static_cast<u128>(plan.t_e - plan.t_s);
  return areas;
}

bool EventOrder(const MemoryRequestEvent& a, const MemoryRequestEvent& b) {
  return std::tie(a.t_s, a.id) < std::tie(b.t_s, b.id);
}

bool DecisionOrder(const AllocationDecision& a, const AllocationDecision& b) {
  return EventOrder(a.event, b.event);
}

// Decisions indexed by base address, for "is this address window free over
// this lifespan" queries.
class AddressIndex {
 public:
  explicit AddressIndex(Bytes max_size) : max_size_(max_size) {}

  void Add(const AllocationDecision& d) { by_addr_.emplace(d.addr, &d.event); }

  bool Fits(Bytes addr, const MemoryRequestEvent& e) const {
    Bytes from = addr >= max_size_ ? addr - max_size_ + 1 : 0;
    for (auto it = by_addr_.lower_bound(from);
         it != by_addr_.end() && it->first < addr + e.size; ++it) {
      const MemoryRequestEvent& other = *it->second;
      if (it->first + other.size <= addr) continue;
      if (LifespansOverlap(e.t_s, e.t_e, other.t_s, other.t_e)) return false;
    }
    return true;
  }

 private:
  Bytes max_size_;
  std::multimap<Bytes, const MemoryRequestEvent*> by_addr_;
};

bool HasCommonInstant(const LocalPlan& plan) {
  Timestamp latest_start = std::numeric_limits<Timestamp>::min();
  Timestamp earliest_end = std::numeric_limits<Timestamp>::max();
  for (const auto& d : plan.decisions) {
    latest_start = std::max(latest_start, d.event.t_s);
    earliest_end = std::min(earliest_end, d.event.t_e);
  }
  return latest_start < earliest_end;
}

LocalPlan SingleEventPlan(const AllocationDecision& d) {
  LocalPlan plan;
  plan.decisions.push_back({d.event, 0});
  plan.p_s = d.event.p_s;
  plan.p_e = d.event.p_e;
  plan.Refresh();
  return plan;
}

using PhaseRank = std::map<PhaseId, Timestamp>;

// Each phase is ranked by the earliest timestamp known to fall inside it.
PhaseRank RankPhases(std::span<const MemoryRequestEvent> events) {
  PhaseRank rank;
  auto note = [&rank](const PhaseId& phase, Timestamp t) {
    auto [it, inserted] = rank.emplace(phase, t);
    if (!inserted) it->second = std::min(it->second, t);
  };
  for (const auto& e : events) {
    note(e.p_s, e.t_s);
    note(e.p_e, e.t_e);
  }
  return rank;
}

struct FusionNode {
  LocalPlan plan;
  std::size_t version = 0;
  bool alive = true;
};

void FuseToFixpoint(std::vector<LocalPlan>& plans, const PhaseRank& rank,
                    PlannerStats& stats) {
  std::vector<FusionNode> nodes;
  nodes.reserve(plans.size());
  for (auto& plan : plans) nodes.push_back({std::move(plan), 0, true});
  plans.clear();

  auto schedule_less = [&](std::size_t a, std::size_t b) {
    const LocalPlan& x = nodes[a].plan;
    const LocalPlan& y = nodes[b].plan;
    return std::make_tuple(rank.at(x.p_s), rank.at(x.p_e), x.min_id()) <
           std::make_tuple(rank.at(y.p_s), rank.at(y.p_e), y.min_id());
  };

  // Pairs already rejected, keyed by node identity and version. A pair is
  // only retried after one of its members changed.
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>
      rejected;
  std::size_t next_version = 1;

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].alive) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), schedule_less);
    std::map<PhaseId, std::vector<std::size_t>> by_start;
    for (std::size_t i : order) by_start[nodes[i].plan.p_s].push_back(i);

    for (std::size_t i : order) {
      for (bool again = true; again && nodes[i].alive;) {
        again = false;
        auto bucket = by_start.find(nodes[i].plan.p_e);
        if (bucket == by_start.end()) break;
        for (std::size_t j : bucket->second) {
          if (j == i || !nodes[j].alive) continue;
          auto key = std::make_tuple(i, nodes[i].version, j, nodes[j].version);
          if (rejected.contains(key)) continue;

          const bool i_larger = nodes[i].plan.height >= nodes[j].plan.height;
          const LocalPlan& larger = i_larger ? nodes[i].plan : nodes[j].plan;
          const LocalPlan& smaller = i_larger ? nodes[j].plan : nodes[i].plan;
          FusionRecord record;
          std::optional<LocalPlan> fused = TryFuse(larger, smaller, &record);
          if (!fused) {
            rejected.insert(key);
            ++stats.fusion_rejected;
            continue;
          }
          const LocalPlan& a = nodes[i].plan;
          const LocalPlan& b = nodes[j].plan;
          fused->p_s = rank.at(a.p_s) <= rank.at(b.p_s) ? a.p_s : b.p_s;
          fused->p_e = rank.at(a.p_e) >= rank.at(b.p_e) ? a.p_e : b.p_e;
          nodes[i].plan = std::move(*fused);
          nodes[i].version = next_version++;
          nodes[j].alive = false;
          ++stats.fusion_accepted;
          stats.fusions.push_back(record);
          changed = true;
          again = true;
          break;
        }
      }
    }
  }

  for (auto& node : nodes) {
    if (node.alive) plans.push_back(std::move(node.plan));
  }
}

// Occupancy of one layer while the plan is being assembled.
struct LayerBuild {
  Bytes size = 0;
  std::map<Timestamp, std::pair<Timestamp, std::size_t>> occupants;

  // Returns the end of the preceding occupant when [t_s, t_e) is free.
  std::optional<Timestamp> FreeAt(Timestamp t_s, Timestamp t_e) const {
    auto next = occupants.lower_bound(t_s);
    if (next != occupants.end() && next->first < t_e) return std::nullopt;
    if (next == occupants.begin()) {
      return std::numeric_limits<Timestamp>::min();
    }
    auto prev = std::prev(next);
    if (prev->second.first > t_s) return std::nullopt;
    return prev->second.first;
  }

  MemoryLayer Finish() const {
    MemoryLayer layer;
    layer.size = size;
    for (const auto& [t_s, rest] : occupants) {
      layer.slots.push_back({t_s, rest.first, rest.second});
      layer.end = rest.first;
    }
    return layer;
  }
};

}  // namespace

RequestId LocalPlan::min_id() const {
  RequestId id = std::numeric_limits<RequestId>::max();
  for (const auto& d : decisions) id = std::min(id, d.event.id);
  return id;
}

void LocalPlan::Refresh() {
  if (decisions.empty()) {
    height = 0;
    t_s = t_e = 0;
    tmp = 0.0;
    return;
  }
  height = 0;
  t_s = std::numeric_limits<Timestamp>::max();
  t_e = std::numeric_limits<Timestamp>::min();
  for (const auto& d : decisions) {
    height = std::max(height, d.end());
    t_s = std::min(t_s, d.event.t_s);
    t_e = std::max(t_e, d.event.t_e);
  }
  Areas areas = AreasOf(*this);
  tmp = areas.reserved == 0
            ? 0.0
            : static_cast<double>(static_cast<long double>(areas.used) /
                                  static_cast<long double>(areas.reserved));
}

std::vector<std::pair<Timestamp, Timestamp>> MemoryLayer::Gaps(
    Timestamp horizon) const {
  std::vector<std::pair<Timestamp, Timestamp>> gaps;
  Timestamp cursor = 0;
  for (const auto& slot : slots) {
    if (slot.t_s > cursor) gaps.emplace_back(cursor, slot.t_s);
    cursor = std::max(cursor, slot.t_e);
  }
  if (cursor < horizon) gaps.emplace_back(cursor, horizon);
  return gaps;
}

std::vector<HomoPhaseGroup> GroupByPhase(
    std::span<const MemoryRequestEvent> events) {
  std::map<std::pair<PhaseId, PhaseId>, std::vector<MemoryRequestEvent>> keyed;
  for (const auto& e : events) keyed[{e.p_s, e.p_e}].push_back(e);

  std::vector<HomoPhaseGroup> groups;
  groups.reserve(keyed.size());
  for (auto& [key, members] : keyed) {
    std::sort(members.begin(), members.end(), EventOrder);
    groups.push_back({key.first, key.second, std::move(members)});
  }
  std::sort(groups.begin(), groups.end(),
            [](const HomoPhaseGroup& a, const HomoPhaseGroup& b) {
              return EventOrder(a.members.front(), b.members.front());
            });
  return groups;
}

LocalPlan PackGroup(const HomoPhaseGroup& group) {
  LocalPlan plan;
  plan.p_s = group.p_s;
  plan.p_e = group.p_e;
  std::vector<MemoryRequestEvent> members = group.members;
  std::sort(members.begin(), members.end(), EventOrder);
  Bytes addr = 0;
  for (const auto& e : members) {
    plan.decisions.push_back({e, addr});
    addr += e.size;
  }
  plan.Refresh();
  return plan;
}

double ComputeTmp(const LocalPlan& plan) {
  if (plan.empty() || plan.height == 0 || plan.t_e <= plan.t_s) {
    throw ValidationError("degenerate lifespan");
  }
  Areas areas = AreasOf(plan);
  return static_cast<double>(static_cast<long double>(areas.used) /
                             static_cast<long double>(areas.reserved));
}

std::optional<LocalPlan> TryFuse(const LocalPlan& larger,
                                 const LocalPlan& smaller,
                                 FusionRecord* record) {
  if (smaller.empty()) return larger;
  if (larger.empty()) return smaller;

  LocalPlan fused;
  fused.p_s = larger.p_s;
  fused.p_e = larger.p_e;
  fused.fused = true;
  fused.decisions = larger.decisions;
  fused.decisions.reserve(larger.decisions.size() + smaller.decisions.size());

  Bytes max_size = 0;
  for (const auto& d : larger.decisions) max_size = std::max(max_size, d.event.size);
  for (const auto& d : smaller.decisions) max_size = std::max(max_size, d.event.size);

  // Pointers into fused.decisions stay valid: capacity was reserved.
  AddressIndex index(max_size);
  for (const auto& d : fused.decisions) index.Add(d);

  std::vector<Bytes> stops;
  for (const auto& d : larger.decisions) stops.push_back(d.addr);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::vector<const MemoryRequestEvent*> pending;
  for (const auto& d : smaller.decisions) pending.push_back(&d.event);
  std::sort(pending.begin(), pending.end(),
            [](const MemoryRequestEvent* a, const MemoryRequestEvent* b) {
              return EventOrder(*a, *b);
            });

  Bytes top = larger.height;
  Bytes addr = stops.front();
  std::size_t remaining = pending.size();
  while (remaining > 0) {
    // Earliest-starting pending request that fits at addr.
    auto it = std::find_if(pending.begin(), pending.end(),
                           [&](const MemoryRequestEvent* e) {
                             return e != nullptr && index.Fits(addr, *e);
                           });
    if (it != pending.end()) {
      fused.decisions.push_back({**it, addr});
      index.Add(fused.decisions.back());
      addr += (*it)->size;
      top = std::max(top, addr);
      *it = nullptr;
      --remaining;
      continue;
    }
    auto next = std::upper_bound(stops.begin(), stops.end(), addr);
    if (next != stops.end()) {
      addr = *next;
    } else if (addr < top) {
      // Past the last base address: everything fits above the current top.
      addr = top;
    } else {
      throw InternalError("fusion made no progress at the top of the plan");
    }
  }
  fused.Refresh();

  Areas l = AreasOf(larger);
  Areas s = AreasOf(smaller);
  Areas f = AreasOf(fused);
  // Same decisions on both sides, so TMP(fused) beats the weighted average
  // exactly when the fused reservation is smaller than the two combined.
  const bool accepted = f.reserved < l.reserved + s.reserved;
  if (record != nullptr) {
    auto ld = [](u128 v) { return static_cast<long double>(v); };
    record->larger_used = ld(l.used);
    record->larger_reserved = ld(l.reserved);
    record->smaller_used = ld(s.used);
    record->smaller_reserved = ld(s.reserved);
    record->fused_used = ld(f.used);
    record->fused_reserved = ld(f.reserved);
    record->fused_tmp = fused.tmp;
    record->weighted_tmp = static_cast<double>(
        (ld(l.used) + ld(s.used)) / (ld(l.reserved) + ld(s.reserved)));
    record->accepted = accepted;
  }
  if (!accepted) return std::nullopt;
  return fused;
}

std::vector<MemoryLayer> BuildLayersForSize(Bytes size,
                                            std::span<const LayerInput> items) {
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(items[a].t_s, items[a].id) <
           std::tie(items[b].t_s, items[b].id);
  });

  std::vector<MemoryLayer> layers;
  std::set<std::pair<Timestamp, std::size_t>> ends;  // (layer end, layer)
  for (std::size_t idx : order) {
    const LayerInput& item = items[idx];
    // Latest end not after t_s; among equal ends the oldest layer.
    auto it = ends.upper_bound({item.t_s, std::numeric_limits<std::size_t>::max()});
    std::size_t target;
    if (it == ends.begin()) {
      target = layers.size();
      layers.push_back(MemoryLayer{size, {}, 0});
    } else {
      Timestamp end = std::prev(it)->first;
      auto chosen = ends.lower_bound({end, 0});
      target = chosen->second;
      ends.erase(chosen);
    }
    layers[target].slots.push_back({item.t_s, item.t_e, idx});
    layers[target].end = item.t_e;
    ends.insert({item.t_e, target});
  }
  return layers;
}

namespace {

struct Assembly {
  StaticPlan plan;
  std::size_t dissolved_groups = 0;
  std::size_t layer_items = 0;
  std::size_t size_classes = 0;
  std::size_t gap_inserted = 0;
};

// Layers the local plans by height and stacks them above the persistent
// block.
Assembly Assemble(std::vector<LocalPlan> plans,
                  const std::vector<MemoryRequestEvent>& persistent,
                  const PlannerOptions& options) {
  Assembly out;
  // Contiguous packing only pays off when the members are live together.
  // Unfused groups without a common instant become per-request items.
  std::vector<LocalPlan> items;
  for (auto& plan : plans) {
    if (!plan.fused && plan.decisions.size() > 1 && !HasCommonInstant(plan)) {
      ++out.dissolved_groups;
      for (const auto& d : plan.decisions) items.push_back(SingleEventPlan(d));
    } else {
      items.push_back(std::move(plan));
    }
  }
  out.layer_items = items.size();

  std::map<Bytes, std::vector<std::size_t>, std::greater<>> by_height;
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_height[items[i].height].push_back(i);
  }
  out.size_classes = by_height.size();

  std::vector<LayerBuild> built;
  for (auto& [height, members] : by_height) {
    std::vector<RequestId> min_ids(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      min_ids[k] = items[members[k]].min_id();
    }
    std::vector<std::size_t> order(members.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(items[members[a]].t_s, min_ids[a]) <
             std::tie(items[members[b]].t_s, min_ids[b]);
    });

    std::vector<std::size_t> rest;
    for (std::size_t k : order) {
      const std::size_t idx = members[k];
      const LocalPlan& item = items[idx];
      std::optional<std::size_t> best;
      std::tuple<Bytes, Timestamp, std::size_t> best_key;
      if (options.gap_insert) {
        for (std::size_t l = 0; l < built.size(); ++l) {
          if (built[l].size <= height) continue;
          auto prev_end = built[l].FreeAt(item.t_s, item.t_e);
          if (!prev_end) continue;
          // Smallest layer first, then the tightest preceding gap.
          auto key = std::make_tuple(built[l].size, -*prev_end, l);
          if (!best || key < best_key) {
            best = l;
            best_key = key;
          }
        }
      }
      if (best) {
        built[*best].occupants.emplace(item.t_s, std::make_pair(item.t_e, idx));
        ++out.gap_inserted;
      } else {
        rest.push_back(idx);
      }
    }

    std::vector<LayerInput> inputs;
    inputs.reserve(rest.size());
    for (std::size_t idx : rest) {
      inputs.push_back({items[idx].t_s, items[idx].t_e, items[idx].min_id()});
    }
    for (const MemoryLayer& layer : BuildLayersForSize(height, inputs)) {
      LayerBuild b;
      b.size = layer.size;
      for (const LayerSlot& slot : layer.slots) {
        b.occupants.emplace(slot.t_s, std::make_pair(slot.t_e, rest[slot.item]));
      }
      built.push_back(std::move(b));
    }
  }

  StaticPlan& plan = out.plan;
  plan.alignment = options.alignment;
  Bytes base = 0;
  auto emit = [&](const LocalPlan& item, Bytes at) {
    for (const auto& d : item.decisions) {
      plan.decisions.push_back({d.event, at + d.addr});
    }
  };
  if (!persistent.empty()) {
    HomoPhaseGroup block{persistent.front().p_s, persistent.front().p_e,
                         persistent};
    LocalPlan packed = PackGroup(block);
    MemoryLayer layer{packed.height, {{packed.t_s, packed.t_e, items.size()}},
                      packed.t_e};
    emit(packed, base);
    plan.layers.push_back({base, std::move(layer)});
    base += packed.height;
  }
  for (const LayerBuild& b : built) {
    for (const auto& [t_s, rest] : b.occupants) emit(items[rest.second], base);
    plan.layers.push_back({base, b.Finish()});
    base += b.size;
  }
  plan.pool_size = base;
  std::sort(plan.decisions.begin(), plan.decisions.end(), DecisionOrder);
  return out;
}

}  // namespace

StaticPlan SynthesizeStaticPlan(std::span<const MemoryRequestEvent> events,
                                const PlannerOptions& options,
                                PlannerStats* stats_out) {
  const auto started = std::chrono::steady_clock::now();
  PlannerStats stats;
  stats.static_events = events.size();

  std::vector<MemoryRequestEvent> persistent;
  std::vector<MemoryRequestEvent> regular;
  for (const auto& e : events) {
    if (e.dynamic) {
      throw ValidationError("static planner given dynamic event " +
                            std::to_string(e.id));
    }
    if (e.t_e <= e.t_s) throw ValidationError("degenerate lifespan");
    if (options.horizon && e.t_e >= *options.horizon) {
      persistent.push_back(e);
    } else {
      regular.push_back(e);
    }
  }
  stats.persistent_events = persistent.size();

  const PhaseRank rank = RankPhases(events);
  std::vector<HomoPhaseGroup> groups = GroupByPhase(regular);
  stats.phase_groups = groups.size();
  std::vector<LocalPlan> plans;
  plans.reserve(groups.size());
  for (const auto& group : groups) plans.push_back(PackGroup(group));

  Assembly chosen;
  if (options.fusion) {
    std::vector<LocalPlan> fused = plans;
    FuseToFixpoint(fused, rank, stats);
    chosen = Assemble(std::move(fused), persistent, options);
    stats.fusion_kept = true;
    // Fusions are judged one pair at a time. When they leave groups of
    // mixed heights that no longer share layers, the unfused layout wins.
    if (options.fusion_guard && stats.fusion_accepted > 0) {
      Assembly unfused = Assemble(std::move(plans), persistent, options);
      if (unfused.plan.pool_size < chosen.plan.pool_size) {
        chosen = std::move(unfused);
        stats.fusion_kept = false;
      }
    }
  } else {
    chosen = Assemble(std::move(plans), persistent, options);
  }
  stats.dissolved_groups = chosen.dissolved_groups;
  stats.layer_items = chosen.layer_items;
  stats.size_classes = chosen.size_classes;
  stats.gap_inserted = chosen.gap_inserted;
  stats.layers = chosen.plan.layers.size();

  stats.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
  if (stats_out != nullptr) *stats_out = std::move(stats);
  return std::move(chosen.plan);
}

StaticPlan PlanTrace(const Trace& trace, PlannerOptions options,
                     PlannerStats* stats) {
  options.horizon = trace.horizon;
  std::vector<MemoryRequestEvent> events = StaticEvents(trace);
  return SynthesizeStaticPlan(events, options, stats);
}

PlanValidation ValidatePlan(const StaticPlan& plan) {
  PlanValidation report;
  const auto& decisions = plan.decisions;
  Bytes max_size = 0;
  for (const auto& d : decisions) {
    max_size = std::max(max_size, d.event.size);
    if (d.end() > plan.pool_size) report.out_of_pool.push_back(d.event.id);
  }

  // (time, is_alloc, index); frees sort first at equal times.
  std::vector<std::tuple<Timestamp, int, std::size_t>> points;
  points.reserve(decisions.size() * 2);
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    points.emplace_back(decisions[i].event.t_s, 1, i);
    points.emplace_back(decisions[i].event.t_e, 0, i);
  }
  std::sort(points.begin(), points.end());

  std::multimap<Bytes, std::size_t> active;
  for (const auto& [t, is_alloc, i] : points) {
    const AllocationDecision& d = decisions[i];
    if (is_alloc == 0) {
      auto [first, last] = active.equal_range(d.addr);
      for (auto it = first; it != last; ++it) {
        if (it->second == i) {
          active.erase(it);
          break;
        }
      }
      continue;
    }
    Bytes from = d.addr >= max_size ? d.addr - max_size + 1 : 0;
    for (auto it = active.lower_bound(from);
         it != active.end() && it->first < d.end(); ++it) {
      const AllocationDecision& other = decisions[it->second];
      if (other.end() <= d.addr) continue;
      report.conflicts.emplace_back(std::min(d.event.id, other.event.id),
                                    std::max(d.event.id, other.event.id));
    }
    active.emplace(d.addr, i);
  }
  std::sort(report.conflicts.begin(), report.conflicts.end());
  return report;
}

}  // namespace stplan
