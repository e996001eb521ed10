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

#include "stplan/report.h"

#include <algorithm>

#include "json.hpp"
#include "stplan/error.h"

namespace stplan {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ReportJson(const SimReport& r) {
  ordered_json j;
  j["allocator"] = r.allocator;
  j["peak_allocated"] = r.peak_allocated;
  j["reserved"] = r.reserved;
  j["efficiency"] = r.efficiency;
  j["fragmentation"] = r.fragmentation;
  j["pool_size"] = r.pool_size;
  j["fallback_count"] = r.fallback_count;
  j["fallback_bytes_peak"] = r.fallback_bytes_peak;
  j["fallback_reserved"] = r.fallback_reserved;
  j["reuse_hits"] = r.reuse_hits;
  j["mismatch_count"] = r.mismatch_count;
  return j;
}

const char* RouteName(Route route) {
  switch (route) {
    case Route::kStatic: return "static";
    case Route::kDynamic: return "dynamic";
    case Route::kFallback: return "fallback";
  }
  return "?";
}

const char* OpName(LogOp op) {
  switch (op) {
    case LogOp::kAlloc: return "alloc";
    case LogOp::kFree: return "free";
    case LogOp::kReserve: return "reserve";
  }
  return "?";
}

}  // namespace

SimReport ComputeMetrics(std::span<const LogEntry> log, Bytes pool_size,
                         std::string allocator) {
  SimReport r;
  r.allocator = std::move(allocator);
  r.pool_size = pool_size;
  Bytes live = 0;
  Bytes fallback_live = 0;
  for (const LogEntry& e : log) {
    switch (e.op) {
      case LogOp::kReserve:
        r.fallback_reserved += e.size;
        break;
      case LogOp::kAlloc:
        live += e.size;
        r.peak_allocated = std::max(r.peak_allocated, live);
        if (e.route == Route::kFallback) {
          ++r.fallback_count;
          fallback_live += e.size;
          r.fallback_bytes_peak = std::max(r.fallback_bytes_peak, fallback_live);
        }
        if (e.route == Route::kDynamic) ++r.reuse_hits;
        if (e.mismatch) ++r.mismatch_count;
        break;
      case LogOp::kFree:
        if (e.size > live) throw InternalError("log frees more bytes than are live");
        live -= e.size;
        if (e.route == Route::kFallback) fallback_live -= e.size;
        break;
    }
  }
  r.reserved = pool_size + r.fallback_reserved;
  if (r.reserved == 0) {
    r.efficiency = 1.0;
  } else {
    r.efficiency = static_cast<double>(r.peak_allocated) / static_cast<double>(r.reserved);
  }
  r.fragmentation = 1.0 - r.efficiency;
  return r;
}

CompareReport MakeCompare(const SimReport& planner, const SimReport& baseline) {
  CompareReport c;
  c.planner = planner;
  c.baseline = baseline;
  if (baseline.fragmentation > 0.0) {
    c.fragmentation_reduction = 1.0 - planner.fragmentation / baseline.fragmentation;
  }
  c.memory_saved_bytes = static_cast<std::int64_t>(baseline.reserved) -
                         static_cast<std::int64_t>(planner.reserved);
  if (baseline.reserved > 0) {
    c.memory_saved_ratio = static_cast<double>(c.memory_saved_bytes) /
                           static_cast<double>(baseline.reserved);
  }
  return c;
}

std::string SerializeReport(const SimReport& report) {
  return ReportJson(report).dump(1) + "\n";
}

std::string SerializeCompare(const CompareReport& c) {
  ordered_json j;
  j["planner"] = ReportJson(c.planner);
  j["baseline"] = ReportJson(c.baseline);
  j["fragmentation_reduction"] =
      c.fragmentation_reduction ? ordered_json(*c.fragmentation_reduction) : nullptr;
  j["memory_saved_bytes"] = c.memory_saved_bytes;
  j["memory_saved_ratio"] =
      c.memory_saved_ratio ? ordered_json(*c.memory_saved_ratio) : nullptr;
  return j.dump(1) + "\n";
}

std::string SerializeLog(std::span<const LogEntry> log) {
  std::string out;
  for (const LogEntry& e : log) {
    ordered_json j;
    j["t"] = e.t;
    j["op"] = OpName(e.op);
    j["id"] = e.id;
    j["addr"] = e.addr;
    j["size"] = e.size;
    if (e.op != LogOp::kReserve) j["route"] = RouteName(e.route);
    if (e.mismatch) j["mismatch"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace stplan
