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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "stplan/error.h"

namespace stplan {

namespace {

constexpr Bytes kMinSampled = Bytes{256} << 10;
constexpr Bytes kMaxSampled = Bytes{8} << 20;
constexpr std::uint64_t kLayoutSalt = 0x9e3779b97f4a7c15ULL;

// Modulo reduction instead of std::uniform_int_distribution and a hand
// written Fisher-Yates instead of std::shuffle: both std facilities are
// implementation-defined, and traces must match across toolchains.
std::uint64_t Below(std::mt19937_64& rng, std::uint64_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

std::vector<std::size_t> Permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[Below(rng, i)]);
  }
  return perm;
}

struct Layout {
  std::vector<Bytes> slot_sizes;  // activation size per slot
  std::vector<bool> transient;    // slot is preceded by a unary-op temporary
  Bytes grad_size = 0;
  Bytes opt_size = 0;
};

Layout MakeLayout(const std::vector<Bytes>& palette, double transient_ratio,
                  std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kLayoutSalt);
  const std::size_t p = palette.size();
  std::vector<std::size_t> perm = Permutation(p, rng);
  Layout layout;
  for (std::size_t i = 0; i < p; ++i) layout.slot_sizes.push_back(palette[perm[i]]);
  layout.transient.assign(p, false);
  const auto transients = static_cast<std::size_t>(
      std::lround(transient_ratio * static_cast<double>(p)));
  std::vector<std::size_t> pick = Permutation(p, rng);
  for (std::size_t i = 0; i < std::min(transients, p); ++i) {
    layout.transient[pick[i]] = true;
  }
  layout.grad_size = layout.slot_sizes.front();
  layout.opt_size = layout.slot_sizes.back();
  return layout;
}

std::size_t AttentionSlots(std::size_t p) { return (p + 1) / 2; }

std::string Module(std::uint32_t layer) { return "layers." + std::to_string(layer); }

class Emitter {
 public:
  RequestId Alloc(Bytes size, const PhaseId& phase, const std::string& module,
                  bool dynamic = false) {
    RequestId id = next_id_++;
    records_.push_back({RawOp::kAlloc, id, size, phase, module, dynamic});
    return id;
  }
  void Free(RequestId id, const PhaseId& phase, const std::string& module) {
    records_.push_back({RawOp::kFree, id, 0, phase, module, false});
  }
  std::vector<RawOpRecord> Take() { return std::move(records_); }

 private:
  std::vector<RawOpRecord> records_;
  RequestId next_id_ = 1;
};

void CheckConfig(const SynthConfig& c) {
  if (c.num_layers == 0) throw ValidationError("num_layers must be positive");
  if (c.num_microbatches == 0) {
    throw ValidationError("num_microbatches must be positive");
  }
  if (c.num_chunks == 0) throw ValidationError("num_chunks must be at least 1");
  if (c.num_layers < c.num_chunks) {
    throw ValidationError("num_layers must be at least num_chunks");
  }
  if (c.pipeline_warmup == 0) throw ValidationError("pipeline_warmup must be positive");
  if (c.size_palette.empty()) throw ValidationError("size palette is empty");
  if (c.distinct_sizes != c.size_palette.size()) {
    throw ValidationError("distinct_sizes does not match the palette length");
  }
  std::set<Bytes> unique;
  for (Bytes s : c.size_palette) {
    if (s == 0 || AlignUp(s, c.alignment) != s) {
      throw ValidationError("palette size " + std::to_string(s) + " is not aligned");
    }
    if (!unique.insert(s).second) {
      throw ValidationError("palette size " + std::to_string(s) + " is repeated");
    }
  }
  if (!(c.transient_ratio >= 0.0 && c.transient_ratio <= 1.0)) {
    throw ValidationError("transient_ratio must lie in [0, 1]");
  }
  if (IsMoe(c.preset)) {
    const auto& d = c.moe_size_distribution;
    if (d.max == 0 || d.min == 0 || d.min > d.max) {
      throw ValidationError("moe preset needs a non-empty size distribution");
    }
    if (c.experts_per_layer == 0) {
      throw ValidationError("moe preset needs experts_per_layer > 0");
    }
  }
}

}  // namespace

std::string_view PresetName(Preset preset) {
  switch (preset) {
    case Preset::kDense: return "dense";
    case Preset::kDenseRecompute: return "dense_recompute";
    case Preset::kDenseVpp: return "dense_vpp";
    case Preset::kDenseVppRecompute: return "dense_vpp_recompute";
    case Preset::kMoe: return "moe";
    case Preset::kMoeRecompute: return "moe_recompute";
  }
  return "?";
}

Preset ParsePreset(std::string_view name) {
  for (Preset p : kAllPresets) {
    if (PresetName(p) == name) return p;
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

bool IsRecompute(Preset p) {
  return p == Preset::kDenseRecompute || p == Preset::kDenseVppRecompute ||
         p == Preset::kMoeRecompute;
}
bool IsVpp(Preset p) { return p == Preset::kDenseVpp || p == Preset::kDenseVppRecompute; }
bool IsMoe(Preset p) { return p == Preset::kMoe || p == Preset::kMoeRecompute; }

std::vector<Bytes> SamplePalette(std::uint32_t count, std::uint64_t seed,
                                 Bytes alignment) {
  std::mt19937_64 rng(seed);
  std::set<Bytes> seen;
  std::vector<Bytes> palette;
  while (palette.size() < count) {
    Bytes s = AlignUp(kMinSampled + Below(rng, kMaxSampled - kMinSampled), alignment);
    if (seen.insert(s).second) palette.push_back(s);
  }
  return palette;
}

SynthConfig PresetConfig(Preset preset, std::uint32_t num_layers,
                         std::uint32_t num_microbatches, std::uint64_t seed,
                         std::uint32_t distinct_sizes) {
  if (distinct_sizes == 0) throw ValidationError("distinct_sizes must be positive");
  SynthConfig c;
  c.preset = preset;
  c.num_layers = num_layers;
  c.num_microbatches = num_microbatches;
  c.num_chunks = IsVpp(preset) ? 2 : 1;
  c.seed = seed;
  c.distinct_sizes = distinct_sizes;
  c.size_palette = SamplePalette(c.distinct_sizes, seed, c.alignment);
  if (IsMoe(preset)) {
    // Expert buffers range up to the largest MLP-half activation, so they
    // fit the bands that the attention-only expert layers leave idle.
    Layout layout = MakeLayout(c.size_palette, c.transient_ratio, seed);
    const std::size_t p = layout.slot_sizes.size();
    auto first_mlp = layout.slot_sizes.begin() +
                     static_cast<std::ptrdiff_t>(std::min(AttentionSlots(p), p - 1));
    c.moe_size_distribution.min =
        *std::min_element(c.size_palette.begin(), c.size_palette.end());
    c.moe_size_distribution.max = *std::max_element(first_mlp, layout.slot_sizes.end());
    c.moe_size_distribution.seed = seed;
  }
  return c;
}

std::vector<RawOpRecord> SynthRecords(const SynthConfig& c) {
  CheckConfig(c);
  const Layout layout = MakeLayout(c.size_palette, c.transient_ratio, c.seed);
  const std::size_t p = layout.slot_sizes.size();
  const std::uint32_t num_layers = c.num_layers;
  const bool recompute = IsRecompute(c.preset);
  const bool moe = IsMoe(c.preset);
  auto expert_layer = [&](std::uint32_t layer) { return moe && layer % 2 == 1; };
  auto static_slots = [&](std::uint32_t layer) {
    return expert_layer(layer) ? AttentionSlots(p) : p;
  };

  std::mt19937_64 moe_rng(c.moe_size_distribution.seed);
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, Bytes> expert_sizes;
  auto expert_size = [&](std::uint32_t mb, std::uint32_t layer, std::uint32_t k) {
    auto [it, inserted] = expert_sizes.try_emplace({mb, layer, k}, 0);
    if (inserted) {
      const auto& d = c.moe_size_distribution;
      it->second = AlignUp(d.min + Below(moe_rng, d.max - d.min + 1), c.alignment);
    }
    return it->second;
  };

  Emitter out;
  Bytes persistent = c.persistent_bytes;
  if (persistent == 0) {
    persistent = num_layers * std::accumulate(c.size_palette.begin(),
                                              c.size_palette.end(), Bytes{0});
  }
  const Bytes weight =
      std::max(c.alignment, AlignUp(persistent / (4 * Bytes{num_layers}), c.alignment));
  for (std::uint32_t layer = 0; layer < num_layers; ++layer) {
    for (int k = 0; k < 4; ++k) out.Alloc(weight, PhaseId::Init(), "");
  }

  // Live scoped tensors per (microbatch, layer): activations, then experts.
  std::map<std::pair<std::uint32_t, std::uint32_t>,
           std::pair<std::vector<RequestId>, std::vector<RequestId>>>
      live;

  auto layers_of = [&](std::uint32_t chunk) {
    return std::pair<std::uint32_t, std::uint32_t>{chunk * num_layers / c.num_chunks,
                                                   (chunk + 1) * num_layers / c.num_chunks};
  };

  auto forward = [&](std::uint32_t mb, std::uint32_t chunk) {
    const PhaseId phase = PhaseId::Forward(mb, chunk);
    auto [lo, hi] = layers_of(chunk);
    for (std::uint32_t layer = lo; layer < hi; ++layer) {
      const std::string module = Module(layer);
      const std::uint32_t experts = expert_layer(layer) ? c.experts_per_layer : 0;
      if (recompute) {
        // Activations are dropped as soon as the next one exists.
        RequestId prev = 0;
        for (std::size_t j = 0; j < static_slots(layer); ++j) {
          RequestId a = out.Alloc(layout.slot_sizes[j], phase, module);
          if (prev != 0) out.Free(prev, phase, module);
          prev = a;
        }
        for (std::uint32_t k = 0; k < experts; ++k) {
          RequestId d = out.Alloc(expert_size(mb, layer, k), phase, module, true);
          out.Free(prev, phase, module);
          prev = d;
        }
        out.Free(prev, phase, module);
        continue;
      }
      auto& [acts, dyn] = live[{mb, layer}];
      for (std::size_t j = 0; j < static_slots(layer); ++j) {
        RequestId tmp = 0;
        if (layout.transient[j]) {
          tmp = out.Alloc(layout.slot_sizes[(j + 1) % p], phase, module);
        }
        acts.push_back(out.Alloc(layout.slot_sizes[j], phase, module));
        if (tmp != 0) out.Free(tmp, phase, module);
      }
      for (std::uint32_t k = 0; k < experts; ++k) {
        dyn.push_back(out.Alloc(expert_size(mb, layer, k), phase, module, true));
      }
    }
  };

  auto backward = [&](std::uint32_t mb, std::uint32_t chunk) {
    const PhaseId phase = PhaseId::Backward(mb, chunk);
    auto [lo, hi] = layers_of(chunk);
    for (std::uint32_t layer = hi; layer-- > lo;) {
      const std::string module = Module(layer);
      std::vector<RequestId> acts;
      std::vector<RequestId> dyn;
      if (recompute) {
        for (std::size_t j = 0; j < static_slots(layer); ++j) {
          acts.push_back(out.Alloc(layout.slot_sizes[j], phase, module));
        }
        if (expert_layer(layer)) {
          for (std::uint32_t k = 0; k < c.experts_per_layer; ++k) {
            dyn.push_back(out.Alloc(expert_size(mb, layer, k), phase, module, true));
          }
        }
      } else {
        auto node = live.extract({mb, layer});
        acts = std::move(node.mapped().first);
        dyn = std::move(node.mapped().second);
      }
      RequestId grad = out.Alloc(layout.grad_size, phase, module);
      for (auto it = dyn.rbegin(); it != dyn.rend(); ++it) out.Free(*it, phase, module);
      for (auto it = acts.rbegin(); it != acts.rend(); ++it) out.Free(*it, phase, module);
      out.Free(grad, phase, module);
    }
  };

  // Microbatches are scheduled in groups of `pipeline_warmup`; within a
  // group forward runs chunk-major and backward visits chunks in reverse.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> f_units;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> b_units;
  for (std::uint32_t g0 = 0; g0 < c.num_microbatches; g0 += c.pipeline_warmup) {
    const std::uint32_t g1 = std::min(c.num_microbatches, g0 + c.pipeline_warmup);
    for (std::uint32_t chunk = 0; chunk < c.num_chunks; ++chunk) {
      for (std::uint32_t mb = g0; mb < g1; ++mb) f_units.emplace_back(mb, chunk);
    }
    for (std::uint32_t chunk = c.num_chunks; chunk-- > 0;) {
      for (std::uint32_t mb = g0; mb < g1; ++mb) b_units.emplace_back(mb, chunk);
    }
  }
  const std::size_t warmup =
      std::min<std::size_t>(f_units.size(), std::size_t{c.pipeline_warmup} * c.num_chunks);
  std::size_t next_f = 0;
  std::size_t next_b = 0;
  while (next_f < warmup) {
    forward(f_units[next_f].first, f_units[next_f].second);
    ++next_f;
  }
  while (next_f < f_units.size()) {
    forward(f_units[next_f].first, f_units[next_f].second);
    ++next_f;
    backward(b_units[next_b].first, b_units[next_b].second);
    ++next_b;
  }
  for (; next_b < b_units.size(); ++next_b) {
    backward(b_units[next_b].first, b_units[next_b].second);
  }

  for (std::uint32_t layer = 0; layer < num_layers; ++layer) {
    const std::string module = Module(layer);
    RequestId tmp = out.Alloc(layout.opt_size, PhaseId::Optimizer(), module);
    out.Free(tmp, PhaseId::Optimizer(), module);
  }
  return out.Take();
}

Trace SynthTrace(const SynthConfig& config) {
  std::vector<RawOpRecord> records = SynthRecords(config);
  return PairRecords(records, std::nullopt, config.alignment);
}

}  // namespace stplan
