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

#ifndef STPLAN_SVG_TIMELINE_H_
#define STPLAN_SVG_TIMELINE_H_

#include <span>
#include <string>

#include "stplan/plan_io.h"
#include "stplan/report.h"

namespace stplan {

/// Address-over-time plot as an SVG 1.1 document. Each static decision is
/// one <rect class="decision">; reusable space is shaded per group
/// (class "reuse"). When a simulation log is given, fallback allocations
/// are drawn (class "fallback") in a band above the pool.
std::string RenderTimeline(const StaticPlanBundle& bundle,
                           std::span<const LogEntry> log = {});

}  // namespace stplan

#endif  // STPLAN_SVG_TIMELINE_H_
