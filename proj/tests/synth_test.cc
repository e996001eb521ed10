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

#include "stplan/synth.h"

#include <gtest/gtest.h>

#include <set>

#include "stplan/error.h"

namespace stplan {
namespace {

bool Persistent(const Trace& t, const MemoryRequestEvent& e) { return e.t_e >= t.horizon; }

SynthConfig Tiny(Preset preset) {
  SynthConfig c;
  c.preset = preset;
  c.num_layers = 1;
  c.num_microbatches = 1;
  c.size_palette = {4096};
  c.distinct_sizes = 1;
  return c;
}

TEST(SynthTest, TinyDenseTrace) {
  Trace t = SynthTrace(Tiny(Preset::kDense));
  std::set<Bytes> sizes;
  std::size_t persistent = 0;
  std::size_t scoped = 0;
  for (const auto& e : t.events) {
    sizes.insert(e.size);
    persistent += Persistent(t, e);
    scoped += e.size == 4096 && e.p_s == PhaseId::Forward(0) &&
              e.p_e == PhaseId::Backward(0);
  }
  EXPECT_GT(persistent, 0u);
  EXPECT_EQ(scoped, 1u);
  EXPECT_LE(sizes.size(), 2u);  // the palette plus one weight size
}

TEST(SynthTest, RecomputeKeepsActivationsInsideOnePhase) {
  Trace t = SynthTrace(Tiny(Preset::kDenseRecompute));
  for (const auto& e : t.events) {
    if (Persistent(t, e)) continue;
    EXPECT_FALSE(e.p_s == PhaseId::Forward(0) && e.p_e == PhaseId::Backward(0));
    EXPECT_EQ(e.p_s, e.p_e) << e.id;
  }
}

TEST(SynthTest, Deterministic) {
  for (Preset p : kAllPresets) {
    EXPECT_EQ(SynthTrace(PresetConfig(p, 4, 4, 42)), SynthTrace(PresetConfig(p, 4, 4, 42)));
  }
  EXPECT_NE(SynthTrace(PresetConfig(Preset::kDense, 4, 4, 1)),
            SynthTrace(PresetConfig(Preset::kDense, 4, 4, 2)));
}

TEST(SynthTest, ExpertBuffersAreDynamicAndBracketedByTheirLayer) {
  for (Preset p : {Preset::kMoe, Preset::kMoeRecompute}) {
    Trace t = SynthTrace(PresetConfig(p, 4, 3, 3));
    std::size_t dynamic = 0;
    for (const auto& e : t.events) {
      if (!e.dynamic) continue;
      ++dynamic;
      ASSERT_TRUE(e.l_s && e.l_e);
      EXPECT_EQ(ModuleOfLayerInstance(*e.l_s), ModuleOfLayerInstance(*e.l_e));
      if (IsRecompute(p)) {
        EXPECT_EQ(*e.l_s, *e.l_e);
      } else {
        EXPECT_NE(*e.l_s, *e.l_e);
        EXPECT_NE(e.p_s, e.p_e);
      }
    }
    EXPECT_GT(dynamic, 0u);
  }
}

TEST(SynthTest, ExpertSizesFollowDistribution) {
  SynthConfig c = PresetConfig(Preset::kMoe, 4, 4, 9);
  Trace t = SynthTrace(c);
  std::set<Bytes> sizes;
  for (const auto& e : t.events) {
    if (!e.dynamic) continue;
    EXPECT_GE(e.size, c.moe_size_distribution.min);
    EXPECT_LE(e.size, AlignUp(c.moe_size_distribution.max, c.alignment));
    EXPECT_EQ(e.size % c.alignment, 0u);
    sizes.insert(e.size);
  }
  EXPECT_GT(sizes.size(), 1u);
}

TEST(SynthTest, ScopedSizesAreThePaletteForAnyMicrobatchCount) {
  for (std::uint32_t mbs : {1u, 2u, 5u}) {
    SynthConfig c = PresetConfig(Preset::kDense, 3, mbs, 4);
    Trace t = SynthTrace(c);
    std::set<Bytes> scoped;
    for (const auto& e : t.events) {
      if (e.p_s.kind == PhaseKind::kForward && e.p_e.kind == PhaseKind::kBackward) {
        scoped.insert(e.size);
      }
    }
    EXPECT_EQ(scoped, std::set<Bytes>(c.size_palette.begin(), c.size_palette.end()));
    EXPECT_EQ(scoped.size(), c.distinct_sizes);
  }
}

TEST(SynthTest, ScopedTensorsAreFreedInReverseOrder) {
  Trace t = SynthTrace(PresetConfig(Preset::kDense, 4, 4, 6));
  for (std::uint32_t mb = 0; mb < 4; ++mb) {
    std::vector<const MemoryRequestEvent*> scoped;
    for (const auto& e : t.events) {
      if (e.p_s == PhaseId::Forward(mb) && e.p_e == PhaseId::Backward(mb)) {
        scoped.push_back(&e);
      }
    }
    ASSERT_FALSE(scoped.empty());
    for (std::size_t i = 1; i < scoped.size(); ++i) {
      EXPECT_GT(scoped[i - 1]->t_e, scoped[i]->t_e);
    }
  }
}

TEST(SynthTest, RecomputeLowersPeak) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig dense = PresetConfig(Preset::kDense, 6, 4, seed);
    SynthConfig recompute = dense;
    recompute.preset = Preset::kDenseRecompute;
    EXPECT_GE(CliqueLowerBound(SynthTrace(dense)), CliqueLowerBound(SynthTrace(recompute)));
  }
}

TEST(SynthTest, VirtualPipelineInterleavesChunks) {
  Trace t = SynthTrace(PresetConfig(Preset::kDenseVpp, 4, 4, 0));
  std::vector<std::string> tags;
  for (const auto& p : t.phases) tags.push_back(p.phase.Tag());
  ASSERT_GE(tags.size(), 6u);
  EXPECT_EQ(tags[0], "init");
  EXPECT_EQ(tags[1], "F:0");
  EXPECT_EQ(tags[2], "F:1");
  EXPECT_EQ(tags[3], "F:0.1");
  EXPECT_EQ(tags[4], "F:1.1");
  EXPECT_EQ(tags.back(), "opt");
}

TEST(SynthTest, RejectsInconsistentConfigs) {
  SynthConfig c = PresetConfig(Preset::kMoe, 4, 4, 0);
  c.moe_size_distribution = {};
  EXPECT_THROW(SynthTrace(c), Error);
  c = PresetConfig(Preset::kDense, 4, 4, 0);
  c.distinct_sizes = 3;
  EXPECT_THROW(SynthTrace(c), Error);
  c = PresetConfig(Preset::kDense, 4, 4, 0);
  c.size_palette[0] = 1000;
  EXPECT_THROW(SynthTrace(c), Error);
  c = PresetConfig(Preset::kDenseVpp, 1, 4, 0);
  EXPECT_THROW(SynthTrace(c), Error);
  EXPECT_THROW(ParsePreset("sparse"), Error);
}

TEST(SynthTest, PresetNamesRoundTrip) {
  for (Preset p : kAllPresets) EXPECT_EQ(ParsePreset(PresetName(p)), p);
}

}  // namespace
}  // namespace stplan
