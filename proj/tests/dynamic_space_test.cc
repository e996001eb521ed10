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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.h"
#include "stplan/error.h"
#include "stplan/static_planner.h"
#include "stplan/synth.h"

namespace stplan {
namespace {

using testing::Ev;

StaticPlan PlanOf(std::vector<AllocationDecision> decisions) {
  StaticPlan plan;
  for (const auto& d : decisions) plan.pool_size = std::max(plan.pool_size, d.end());
  plan.decisions = std::move(decisions);
  return plan;
}

// Layer "a" opens the range at `start`, layer "b" closes it at `end`.
std::vector<LayerSpan> Schedule(Timestamp start, Timestamp end) {
  return {{"a", start, start + 1}, {"b", end - 1, end}};
}

const HomoLayerGroupKey kKey{"a", "b"};

// Address-by-address, timestamp-by-timestamp occupancy.
IntervalSet ReusableOracle(const StaticPlan& plan, Timestamp t_s, Timestamp t_e) {
  if (plan.decisions.empty()) return {};
  Bytes lo = plan.decisions.front().addr;
  Bytes hi = 0;
  for (const auto& d : plan.decisions) {
    lo = std::min(lo, d.addr);
    hi = std::max(hi, d.end());
  }
  testing::Bitmap free(hi);
  free.Set({lo, hi}, true);
  for (Timestamp t = t_s; t < t_e; ++t) {
    for (const auto& d : plan.decisions) {
      if (d.event.t_s <= t && t < d.event.t_e) free.Set({d.addr, d.end()}, false);
    }
  }
  return IntervalSet::FromUnsorted(free.Runs());
}

TEST(ReusableSpaceTest, SingleDecision) {
  StaticPlan plan = PlanOf({{Ev(1, 100, 0, 10), 0}});
  auto space = ComputeReusableSpace(plan, kKey, Schedule(12, 15));
  EXPECT_EQ(space.t_s, 12);
  EXPECT_EQ(space.t_e, 15);
  EXPECT_EQ(space.reusable, (IntervalSet{{0, 100}}));
  EXPECT_TRUE(ComputeReusableSpace(plan, kKey, Schedule(5, 8)).reusable.empty());
}

TEST(ReusableSpaceTest, TwoDecisions) {
  StaticPlan plan = PlanOf({{Ev(1, 40, 0, 10), 0}, {Ev(2, 60, 20, 30), 40}});
  EXPECT_EQ(ComputeReusableSpace(plan, kKey, Schedule(12, 18)).reusable,
            (IntervalSet{{0, 100}}));
  EXPECT_TRUE(ComputeReusableSpace(plan, kKey, Schedule(8, 22)).reusable.empty());
}

TEST(ReusableSpaceTest, UnknownLayerIsAnError) {
  StaticPlan plan = PlanOf({{Ev(1, 40, 0, 10), 0}});
  EXPECT_THROW(ComputeReusableSpace(plan, {"a", "zz"}, Schedule(1, 5)), Error);
  std::vector<LayerSpan> backwards = {{"a", 10, 12}, {"b", 2, 4}};
  EXPECT_THROW(ComputeReusableSpace(plan, kKey, backwards), Error);
}

TEST(ReusableSpaceProperty, MatchesOccupancyOracleAndShrinksWhenWidened) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 300; ++round) {
    std::vector<AllocationDecision> decisions;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      Timestamp s = static_cast<Timestamp>(rng() % 40);
      decisions.push_back(
          {Ev(i + 1, 1 + rng() % 20, s, s + 1 + static_cast<Timestamp>(rng() % 15)),
           rng() % 80});
    }
    StaticPlan plan = PlanOf(decisions);
    Timestamp a = static_cast<Timestamp>(rng() % 45);
    Timestamp b = a + 2 + static_cast<Timestamp>(rng() % 10);
    auto space = ComputeReusableSpace(plan, kKey, Schedule(a, b));
    ASSERT_EQ(space.reusable, ReusableOracle(plan, a, b));
    for (const auto& d : plan.decisions) {
      if (LifespansOverlap(d.event.t_s, d.event.t_e, a, b)) {
        ASSERT_FALSE(space.reusable.Intersects({d.addr, d.end()}));
      }
    }
    auto wider = ComputeReusableSpace(plan, kKey, Schedule(a > 0 ? a - 1 : a, b + 3));
    ASSERT_EQ(Intersect(wider.reusable, space.reusable), wider.reusable);
  }
}

TEST(GroupDynamicTest, PartitionsByLayerPair) {
  auto dyn = [](RequestId id, const char* ls, const char* le) {
    auto e = Ev(id, 512, 0, 1);
    e.dynamic = true;
    e.l_s = ls;
    e.l_e = le;
    return e;
  };
  std::vector<MemoryRequestEvent> events = {dyn(1, "e0", "e0"), dyn(2, "e0", "e0"),
                                            dyn(3, "e0", "e0"), dyn(4, "e0", "e0"),
                                            dyn(5, "e0", "e1"), dyn(6, "e0", "e1")};
  auto groups = GroupDynamic(events);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups.at({"e0", "e0"}).size(), 4u);
  EXPECT_EQ(groups.at({"e0", "e1"}).size(), 2u);
  EXPECT_TRUE(GroupDynamic({}).empty());
  events.push_back(Ev(7, 512, 0, 1));
  EXPECT_THROW(GroupDynamic(events), Error);
}

TEST(DeriveReuseMapTest, CoversEveryGroupAndIsSafe) {
  for (Preset p : {Preset::kMoe, Preset::kMoeRecompute}) {
    Trace trace = SynthTrace(PresetConfig(p, 4, 4, 8));
    StaticPlan plan = PlanTrace(trace);
    ReuseMap reuse = DeriveReuseMap(trace, plan);
    std::set<HomoLayerGroupKey> keys;
    for (const auto& e : trace.events) {
      if (e.dynamic) keys.insert({*e.l_s, *e.l_e});
    }
    ASSERT_EQ(reuse.size(), keys.size());
    for (const auto& [key, space] : reuse) {
      ASSERT_TRUE(keys.contains(key));
      ASSERT_TRUE(space.reusable.IsCanonical());
      for (const auto& d : plan.decisions) {
        if (LifespansOverlap(d.event.t_s, d.event.t_e, space.t_s, space.t_e)) {
          ASSERT_FALSE(space.reusable.Intersects({d.addr, d.end()}));
        }
      }
      // Phase-level bounds contain the layer-level ones, so they can only
      // leave less room.
      auto phase_of = [&](Timestamp t) { return trace.phases[*trace.PhaseIndexAt(t)]; };
      Timestamp ps = phase_of(space.t_s).start;
      Timestamp pe = phase_of(space.t_e - 1).end;
      IntervalSet coarse = ComputeReusableSpace(plan, kKey, Schedule(ps, pe)).reusable;
      ASSERT_EQ(Intersect(coarse, space.reusable), coarse);
    }
  }
}

}  // namespace
}  // namespace stplan
