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

#include "stplan/model.h"

#include <algorithm>
#include <charconv>
#include <unordered_set>
#include <utility>

#include "stplan/error.h"

namespace stplan {

namespace {

bool ParseUint(std::string_view text, std::uint32_t& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string PhaseId::Tag() const {
  switch (kind) {
    case PhaseKind::kInit:
      return "init";
    case PhaseKind::kOptimizerStep:
      return "opt";
    case PhaseKind::kForward:
    case PhaseKind::kBackward: {
      std::string tag = kind == PhaseKind::kForward ? "F:" : "B:";
      tag += std::to_string(microbatch);
      if (chunk != 0) {
        tag += '.';
        tag += std::to_string(chunk);
      }
      return tag;
    }
  }
  return "?";
}

PhaseId PhaseId::Parse(std::string_view tag) {
  if (tag == "init") return Init();
  if (tag == "opt") return Optimizer();
  if (tag.size() >= 3 && (tag[0] == 'F' || tag[0] == 'B') && tag[1] == ':') {
    PhaseId id{tag[0] == 'F' ? PhaseKind::kForward : PhaseKind::kBackward, 0, 0};
    std::string_view rest = tag.substr(2);
    std::size_t dot = rest.find('.');
    bool ok = ParseUint(rest.substr(0, dot), id.microbatch);
    if (ok && dot != std::string_view::npos) {
      ok = ParseUint(rest.substr(dot + 1), id.chunk);
    }
    if (ok) return id;
  }
  throw ValidationError("invalid phase tag '" + std::string(tag) + "'");
}

std::optional<std::size_t> Trace::PhaseIndexAt(Timestamp t) const {
  auto it = std::upper_bound(
      phases.begin(), phases.end(), t,
      [](Timestamp value, const PhaseSpan& span) { return value < span.start; });
  if (it == phases.begin()) return std::nullopt;
  --it;
  if (t >= it->end) return std::nullopt;
  return static_cast<std::size_t>(it - phases.begin());
}

std::string LayerInstanceName(std::string_view module, const PhaseId& phase) {
  std::string name(module);
  name += '@';
  name += phase.Tag();
  return name;
}

std::string_view ModuleOfLayerInstance(std::string_view instance) {
  std::size_t at = instance.rfind('@');
  return at == std::string_view::npos ? instance : instance.substr(0, at);
}

Bytes CliqueLowerBound(std::span<const MemoryRequestEvent> events) {
  // (time, delta) with frees ordered before allocations at equal time.
  std::vector<std::pair<Timestamp, std::int64_t>> points;
  points.reserve(events.size() * 2);
  for (const auto& e : events) {
    points.emplace_back(e.t_s, static_cast<std::int64_t>(e.size));
    points.emplace_back(e.t_e, -static_cast<std::int64_t>(e.size));
  }
  std::sort(points.begin(), points.end());
  std::int64_t live = 0;
  std::int64_t peak = 0;
  for (const auto& [t, delta] : points) {
    live += delta;
    peak = std::max(peak, live);
  }
  return static_cast<Bytes>(peak);
}

void ValidateTrace(const Trace& trace) {
  if (trace.horizon < 0) throw ValidationError("negative horizon");
  for (std::size_t i = 0; i < trace.phases.size(); ++i) {
    const auto& span = trace.phases[i];
    if (span.start >= span.end) {
      throw ValidationError("empty phase interval for " + span.phase.Tag());
    }
    if (i > 0 && trace.phases[i - 1].end > span.start) {
      throw ValidationError("phase intervals overlap or are unordered at " +
                            span.phase.Tag());
    }
  }
  std::unordered_set<std::string_view> layer_names;
  for (const auto& layer : trace.layers) {
    if (layer.start >= layer.end) {
      throw ValidationError("empty layer interval for " + layer.name);
    }
    layer_names.insert(layer.name);
  }

  std::unordered_set<RequestId> ids;
  for (const auto& e : trace.events) {
    const std::string where = "event " + std::to_string(e.id) + ": ";
    if (!ids.insert(e.id).second) throw ValidationError(where + "duplicate id");
    if (e.size == 0) throw ValidationError(where + "zero size");
    if (e.t_s >= e.t_e) throw ValidationError(where + "t_s must be < t_e");
    if (e.t_s < 0 || e.t_e > trace.horizon) {
      throw ValidationError(where + "lifespan outside [0, horizon]");
    }
    if (e.dynamic && (!e.l_s || !e.l_e)) {
      throw ValidationError(where + "dynamic event missing layer");
    }
    if (!e.dynamic && (e.l_s || e.l_e)) {
      throw ValidationError(where + "static event carries layers");
    }
    if (e.dynamic &&
        (!layer_names.contains(*e.l_s) || !layer_names.contains(*e.l_e))) {
      throw ValidationError(where + "layer not in layer schedule");
    }
    if (trace.phases.empty()) continue;
    auto start_phase = trace.PhaseIndexAt(e.t_s);
    if (!start_phase || trace.phases[*start_phase].phase != e.p_s) {
      throw ValidationError(where + "p_s does not match phase schedule");
    }
    std::optional<std::size_t> end_phase =
        e.t_e >= trace.horizon ? std::optional<std::size_t>(trace.phases.size() - 1)
                               : trace.PhaseIndexAt(e.t_e);
    if (!end_phase || trace.phases[*end_phase].phase != e.p_e) {
      throw ValidationError(where + "p_e does not match phase schedule");
    }
  }
}

std::vector<MemoryRequestEvent> StaticEvents(const Trace& trace) {
  std::vector<MemoryRequestEvent> out;
  for (const auto& e : trace.events) {
    if (!e.dynamic) out.push_back(e);
  }
  return out;
}

std::vector<MemoryRequestEvent> DynamicEvents(const Trace& trace) {
  std::vector<MemoryRequestEvent> out;
  for (const auto& e : trace.events) {
    if (e.dynamic) out.push_back(e);
  }
  return out;
}

std::vector<ReplayOp> ReplayOrder(const Trace& trace) {
  std::vector<ReplayOp> ops;
  ops.reserve(trace.events.size() * 2);
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    ops.push_back({e.t_s, false, i});
    if (e.t_e < trace.horizon) ops.push_back({e.t_e, true, i});
  }
  std::sort(ops.begin(), ops.end(), [&trace](const ReplayOp& a, const ReplayOp& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.free != b.free) return a.free;
    return trace.events[a.event].id < trace.events[b.event].id;
  });
  return ops;
}

}  // namespace stplan
