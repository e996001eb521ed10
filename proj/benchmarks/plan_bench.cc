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

// Plan synthesis time against trace size, plus the two replay paths.

#include <benchmark/benchmark.h>

#include "stplan/caching_allocator.h"
#include "stplan/dynamic_space.h"
#include "stplan/runtime_sim.h"
#include "stplan/static_planner.h"
#include "stplan/synth.h"

namespace stplan {
namespace {

void BM_PlanDense(benchmark::State& state) {
  Trace trace = SynthTrace(
      PresetConfig(Preset::kDense, 32, static_cast<std::uint32_t>(state.range(0)), 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(PlanTrace(trace));
  }
  state.counters["events"] = static_cast<double>(trace.events.size());
  state.SetComplexityN(static_cast<std::int64_t>(trace.events.size()));
}
BENCHMARK(BM_PlanDense)->RangeMultiplier(2)->Range(8, 256)->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_PlanMoeRecompute(benchmark::State& state) {
  Trace trace = SynthTrace(PresetConfig(Preset::kMoeRecompute, 16,
                                        static_cast<std::uint32_t>(state.range(0)), 1));
  for (auto _ : state) {
    StaticPlan plan = PlanTrace(trace);
    benchmark::DoNotOptimize(DeriveReuseMap(trace, plan));
  }
  state.counters["events"] = static_cast<double>(trace.events.size());
}
BENCHMARK(BM_PlanMoeRecompute)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  Trace trace = SynthTrace(PresetConfig(Preset::kMoeRecompute, 16, 32, 1));
  StaticPlan plan = PlanTrace(trace);
  ReuseMap reuse = DeriveReuseMap(trace, plan);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Simulate(trace, plan, reuse));
  }
  state.counters["events"] = static_cast<double>(trace.events.size());
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_Baseline(benchmark::State& state) {
  Trace trace = SynthTrace(PresetConfig(Preset::kDenseVpp, 16, 32, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunBaseline(trace));
  }
  state.counters["events"] = static_cast<double>(trace.events.size());
}
BENCHMARK(BM_Baseline)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace stplan

BENCHMARK_MAIN();
