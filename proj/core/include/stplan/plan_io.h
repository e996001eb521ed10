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

// Plan files: one JSON document holding the static decisions and the
// reusable space of every dynamic request group.
//
//   {"version":1,"pool_size":N,"alignment":512,
//    "decisions":[{"id","addr","size","t_s","t_e","p_s","p_e"}],
//    "reuse_map":[{"l_s","l_e","t_s","t_e","intervals":[[lo,hi]]}]}

#ifndef STPLAN_PLAN_IO_H_
#define STPLAN_PLAN_IO_H_

#include <filesystem>
#include <string>

#include "stplan/dynamic_space.h"
#include "stplan/static_planner.h"

namespace stplan {

inline constexpr int kPlanSchemaVersion = 1;

struct StaticPlanBundle {
  StaticPlan plan;
  ReuseMap reuse;
};

std::string SerializePlan(const StaticPlanBundle& bundle);
/// Throws ValidationError on an unknown version, a malformed document or a
/// decision outside [0, pool_size).
StaticPlanBundle ParsePlan(const std::string& text);

void WritePlan(const StaticPlanBundle& bundle, const std::filesystem::path& path);
StaticPlanBundle ReadPlan(const std::filesystem::path& path);

}  // namespace stplan

#endif  // STPLAN_PLAN_IO_H_
