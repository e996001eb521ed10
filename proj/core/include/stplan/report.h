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

// Replay event logs and the memory-efficiency report derived from them.

#ifndef STPLAN_REPORT_H_
#define STPLAN_REPORT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stplan/model.h"

namespace stplan {

enum class LogOp : std::uint8_t { kAlloc, kFree, kReserve };
enum class Route : std::uint8_t { kStatic, kDynamic, kFallback };

/// kAlloc/kFree carry the request's address range and route; kReserve
/// records the fallback allocator growing by `size` bytes at `addr`.
struct LogEntry {
  Timestamp t = 0;
  LogOp op = LogOp::kAlloc;
  RequestId id = 0;
  Bytes addr = 0;
  Bytes size = 0;
  Route route = Route::kStatic;
  bool mismatch = false;  // static request served outside the plan

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct SimReport {
  std::string allocator;
  Bytes peak_allocated = 0;  // M_a
  Bytes reserved = 0;        // M_r = pool_size + fallback_reserved
  double efficiency = 1.0;   // M_a / M_r, 1 for an empty run
  double fragmentation = 0.0;
  Bytes pool_size = 0;
  std::uint64_t fallback_count = 0;
  Bytes fallback_bytes_peak = 0;  // peak of live fallback bytes
  Bytes fallback_reserved = 0;
  std::uint64_t reuse_hits = 0;
  std::uint64_t mismatch_count = 0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimResult {
  SimReport report;
  std::vector<LogEntry> log;
};

/// Sweeps a complete log. Reserved memory never shrinks, so the reserve
/// total is also its peak.
SimReport ComputeMetrics(std::span<const LogEntry> log, Bytes pool_size,
                         std::string allocator = "");

struct CompareReport {
  SimReport planner;
  SimReport baseline;
  // 1 - frag_planner / frag_baseline; absent when the baseline has none.
  std::optional<double> fragmentation_reduction;
  std::int64_t memory_saved_bytes = 0;  // baseline M_r - planner M_r
  std::optional<double> memory_saved_ratio;
};

CompareReport MakeCompare(const SimReport& planner, const SimReport& baseline);

std::string SerializeReport(const SimReport& report);
std::string SerializeCompare(const CompareReport& compare);
/// JSON lines, one per log entry.
std::string SerializeLog(std::span<const LogEntry> log);

}  // namespace stplan

#endif  // STPLAN_REPORT_H_
