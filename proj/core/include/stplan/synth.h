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

// Synthetic training traces. A trace is one iteration of a pipeline stage:
// persistent weights in "init", forward and backward units scheduled
// 1F1B-style (interleaved across chunks for virtual pipelines), and an
// optimizer step.
//
// Every layer allocates one activation per palette slot, so the set of
// activation sizes is the palette regardless of the microbatch count. MoE
// presets make every odd layer an expert layer: it keeps only the first
// half of the slots and adds dynamically sized expert buffers.

#ifndef STPLAN_SYNTH_H_
#define STPLAN_SYNTH_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "stplan/model.h"
#include "stplan/trace_io.h"

namespace stplan {

enum class Preset {
  kDense,
  kDenseRecompute,
  kDenseVpp,
  kDenseVppRecompute,
  kMoe,
  kMoeRecompute,
};

inline constexpr Preset kAllPresets[] = {
    Preset::kDense,         Preset::kDenseRecompute, Preset::kDenseVpp,
    Preset::kDenseVppRecompute, Preset::kMoe,        Preset::kMoeRecompute,
};

std::string_view PresetName(Preset preset);
Preset ParsePreset(std::string_view name);
bool IsRecompute(Preset preset);
bool IsVpp(Preset preset);
bool IsMoe(Preset preset);

struct MoeSizeDistribution {
  Bytes min = 0;
  Bytes max = 0;
  std::uint64_t seed = 0;
};

struct SynthConfig {
  Preset preset = Preset::kDense;
  std::uint32_t num_layers = 8;
  std::uint32_t num_microbatches = 8;
  std::uint32_t num_chunks = 1;
  // When size_palette is empty, this many sizes are drawn from the seed.
  std::uint32_t distinct_sizes = 8;
  std::vector<Bytes> size_palette;
  Bytes persistent_bytes = 0;  // 0: one palette's worth per layer
  double transient_ratio = 0.3;
  MoeSizeDistribution moe_size_distribution;
  std::uint32_t experts_per_layer = 2;
  std::uint32_t pipeline_warmup = 2;  // microbatches per schedule group
  std::uint64_t seed = 0;
  Bytes alignment = kDefaultAlignment;
};

/// Distinct aligned sizes in [256 KiB, 8 MiB].
std::vector<Bytes> SamplePalette(std::uint32_t count, std::uint64_t seed,
                                 Bytes alignment = kDefaultAlignment);

/// A complete config for `preset`, palette and MoE distribution included.
SynthConfig PresetConfig(Preset preset, std::uint32_t num_layers = 8,
                         std::uint32_t num_microbatches = 8,
                         std::uint64_t seed = 0, std::uint32_t distinct_sizes = 8);

/// The raw operation stream; throws ValidationError on a bad config.
std::vector<RawOpRecord> SynthRecords(const SynthConfig& config);

Trace SynthTrace(const SynthConfig& config);

}  // namespace stplan

#endif  // STPLAN_SYNTH_H_
