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

#include "stplan/svg_timeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <vector>

namespace stplan {

namespace {

constexpr double kWidth = 1200.0;
constexpr double kHeight = 700.0;
constexpr double kMargin = 40.0;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Canvas {
  Timestamp t_max = 1;
  Bytes a_max = 1;

  double X(Timestamp t) const {
    return kMargin + (kWidth - 2 * kMargin) * static_cast<double>(t) /
                         static_cast<double>(t_max);
  }
  // Address 0 sits at the bottom.
  double Y(Bytes a) const {
    return kHeight - kMargin - (kHeight - 2 * kMargin) * static_cast<double>(a) /
                                   static_cast<double>(a_max);
  }
};

void Rect(std::string& out, const char* cls, double x0, double y0, double x1,
          double y1, const std::string& title = {}) {
  out += "<rect class=\"";
  out += cls;
  out += "\" x=\"" + Num(x0) + "\" y=\"" + Num(std::min(y0, y1)) + "\" width=\"" +
         Num(std::max(0.0, x1 - x0)) + "\" height=\"" + Num(std::abs(y1 - y0)) + "\"";
  if (title.empty()) {
    out += "/>\n";
  } else {
    out += "><title>" + title + "</title></rect>\n";
  }
}

}  // namespace

std::string RenderTimeline(const StaticPlanBundle& bundle,
                           std::span<const LogEntry> log) {
  const StaticPlan& plan = bundle.plan;
  Canvas canvas;
  Bytes top = plan.pool_size;
  for (const auto& d : plan.decisions) canvas.t_max = std::max(canvas.t_max, d.event.t_e);
  for (const auto& [key, space] : bundle.reuse) {
    canvas.t_max = std::max(canvas.t_max, space.t_e);
  }
  for (const auto& e : log) {
    canvas.t_max = std::max(canvas.t_max, e.t + 1);
    if (e.route == Route::kFallback) top = std::max(top, e.addr + e.size);
  }
  canvas.a_max = std::max<Bytes>(top, 1);

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         Num(kWidth) + "\" height=\"" + Num(kHeight) + "\" viewBox=\"0 0 " +
         Num(kWidth) + " " + Num(kHeight) + "\">\n";
  out +=
      "<style>.decision{fill:#4a7fb5;stroke:#1d3d5c;stroke-width:0.3}"
      ".reuse{fill:#7bc47f;fill-opacity:0.25}"
      ".fallback-band{fill:#f2d7d5}"
      ".fallback{fill:#c0392b;stroke:#7b241c;stroke-width:0.3}"
      ".pool{fill:none;stroke:#333;stroke-width:1}</style>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + Num(kWidth) + "\" height=\"" + Num(kHeight) +
         "\" fill=\"white\"/>\n";

  if (top > plan.pool_size) {
    Rect(out, "fallback-band", canvas.X(0), canvas.Y(plan.pool_size),
         canvas.X(canvas.t_max), canvas.Y(top));
  }
  for (const auto& [key, space] : bundle.reuse) {
    for (const Interval& iv : space.reusable) {
      Rect(out, "reuse", canvas.X(space.t_s), canvas.Y(iv.lo), canvas.X(space.t_e),
           canvas.Y(iv.hi));
    }
  }
  for (const auto& d : plan.decisions) {
    Rect(out, "decision", canvas.X(d.event.t_s), canvas.Y(d.addr),
         canvas.X(d.event.t_e), canvas.Y(d.end()),
         "id " + std::to_string(d.event.id) + " size " + std::to_string(d.event.size));
  }
  std::unordered_map<RequestId, LogEntry> open;
  auto draw_fallback = [&](const LogEntry& a, Timestamp end) {
    Rect(out, "fallback", canvas.X(a.t), canvas.Y(a.addr), canvas.X(end),
         canvas.Y(a.addr + a.size));
  };
  for (const auto& e : log) {
    if (e.route != Route::kFallback) continue;
    if (e.op == LogOp::kAlloc) {
      open[e.id] = e;
    } else if (e.op == LogOp::kFree) {
      auto it = open.find(e.id);
      if (it != open.end()) {
        draw_fallback(it->second, e.t);
        open.erase(it);
      }
    }
  }
  std::vector<LogEntry> still_live;
  for (const auto& [id, a] : open) still_live.push_back(a);
  std::sort(still_live.begin(), still_live.end(),
            [](const LogEntry& a, const LogEntry& b) { return a.id < b.id; });
  for (const auto& a : still_live) draw_fallback(a, canvas.t_max);

  if (plan.pool_size > 0) {
    Rect(out, "pool", canvas.X(0), canvas.Y(0), canvas.X(canvas.t_max),
         canvas.Y(plan.pool_size));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace stplan
