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

#include "stplan/plan_io.h"

#include "json.hpp"
#include "stplan/error.h"
#include "stplan/trace_io.h"

namespace stplan {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

}  // namespace

std::string SerializePlan(const StaticPlanBundle& bundle) {
  const StaticPlan& plan = bundle.plan;
  ordered_json doc;
  doc["version"] = kPlanSchemaVersion;
  doc["pool_size"] = plan.pool_size;
  doc["alignment"] = plan.alignment;
  doc["decisions"] = ordered_json::array();
  for (const auto& d : plan.decisions) {
    ordered_json entry;
    entry["id"] = d.event.id;
    entry["addr"] = d.addr;
    entry["size"] = d.event.size;
    entry["t_s"] = d.event.t_s;
    entry["t_e"] = d.event.t_e;
    entry["p_s"] = d.event.p_s.Tag();
    entry["p_e"] = d.event.p_e.Tag();
    doc["decisions"].push_back(std::move(entry));
  }
  doc["reuse_map"] = ordered_json::array();
  for (const auto& [key, space] : bundle.reuse) {
    ordered_json entry;
    entry["l_s"] = key.l_s;
    entry["l_e"] = key.l_e;
    entry["t_s"] = space.t_s;
    entry["t_e"] = space.t_e;
    entry["intervals"] = ordered_json::array();
    for (const Interval& iv : space.reusable) {
      entry["intervals"].push_back({iv.lo, iv.hi});
    }
    doc["reuse_map"].push_back(std::move(entry));
  }
  return doc.dump(1) + "\n";
}

StaticPlanBundle ParsePlan(const std::string& text) {
  StaticPlanBundle bundle;
  StaticPlan& plan = bundle.plan;
  try {
    json doc = json::parse(text);
    const auto version = doc.at("version").get<std::int64_t>();
    if (version != kPlanSchemaVersion) {
      throw ValidationError("unsupported plan schema version " +
                            std::to_string(version));
    }
    plan.pool_size = doc.at("pool_size").get<Bytes>();
    plan.alignment = doc.value("alignment", kDefaultAlignment);
    for (const auto& entry : doc.at("decisions")) {
      AllocationDecision d;
      d.event.id = entry.at("id").get<RequestId>();
      d.addr = entry.at("addr").get<Bytes>();
      d.event.size = entry.at("size").get<Bytes>();
      d.event.t_s = entry.at("t_s").get<Timestamp>();
      d.event.t_e = entry.at("t_e").get<Timestamp>();
      d.event.p_s = PhaseId::Parse(entry.at("p_s").get<std::string>());
      d.event.p_e = PhaseId::Parse(entry.at("p_e").get<std::string>());
      if (d.event.size == 0 || d.addr >= plan.pool_size ||
          d.end() > plan.pool_size || d.end() < d.addr) {
        throw ValidationError("decision out of pool: id " + std::to_string(d.event.id));
      }
      if (d.event.t_s >= d.event.t_e) {
        throw ValidationError("decision " + std::to_string(d.event.id) +
                              " has an empty lifespan");
      }
      plan.decisions.push_back(std::move(d));
    }
    for (const auto& entry : doc.at("reuse_map")) {
      HomoLayerGroupKey key{entry.at("l_s").get<std::string>(),
                            entry.at("l_e").get<std::string>()};
      ReuseSpace space;
      space.t_s = entry.at("t_s").get<Timestamp>();
      space.t_e = entry.at("t_e").get<Timestamp>();
      std::vector<Interval> intervals;
      for (const auto& iv : entry.at("intervals")) {
        Interval interval{iv.at(0).get<Bytes>(), iv.at(1).get<Bytes>()};
        if (interval.lo >= interval.hi || interval.hi > plan.pool_size) {
          throw ValidationError("reusable interval out of pool for " + key.l_s);
        }
        intervals.push_back(interval);
      }
      space.reusable = IntervalSet::FromUnsorted(std::move(intervals));
      if (!bundle.reuse.emplace(std::move(key), std::move(space)).second) {
        throw ValidationError("duplicate reuse_map key");
      }
    }
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed plan: ") + ex.what());
  }
  return bundle;
}

void WritePlan(const StaticPlanBundle& bundle, const std::filesystem::path& path) {
  WriteFile(path, SerializePlan(bundle));
}

StaticPlanBundle ReadPlan(const std::filesystem::path& path) {
  return ParsePlan(ReadFile(path));
}

}  // namespace stplan
