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

// Line-delimited JSON trace files.
//
// Raw format (the profiler's operation stream), one record per line:
//
//   {"version":1,"format":"raw","horizon":N}          optional header
//   {"op":"alloc","id":1,"size":1024,"phase":"F:0","module":"layers.0","dynamic":false}
//   {"op":"free","id":1,"phase":"B:0","module":"layers.0"}
//
// The record index is the timestamp. Paired format: a header carrying the
// phase and layer schedules, then one request event per line.

#ifndef STPLAN_TRACE_IO_H_
#define STPLAN_TRACE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stplan/model.h"

namespace stplan {

inline constexpr int kTraceSchemaVersion = 1;

enum class RawOp { kAlloc, kFree };

struct RawOpRecord {
  RawOp op = RawOp::kAlloc;
  RequestId id = 0;
  Bytes size = 0;  // alloc only
  PhaseId phase;
  std::string module;
  bool dynamic = false;  // alloc only

  friend bool operator==(const RawOpRecord&, const RawOpRecord&) = default;
};

/// Fuses alloc/free records into events. Timestamps are record indices;
/// requests never freed become persistent (t_e = horizon, p_e = last
/// phase). Layer instances are maximal runs of records with the same
/// (module, phase). `lines`, when given, maps record index to source line
/// for error messages.
Trace PairRecords(std::span<const RawOpRecord> records,
                  std::optional<Timestamp> horizon = std::nullopt,
                  Bytes alignment = kDefaultAlignment,
                  std::span<const std::size_t> lines = {});

/// Inverse of PairRecords for traces with at most one operation per
/// timestamp.
std::vector<RawOpRecord> ToRawRecords(const Trace& trace);

/// Reads either format; the header's "format" selects the parser.
Trace ReadTrace(std::istream& in, Bytes alignment = kDefaultAlignment);
Trace ParseTrace(const std::filesystem::path& path,
                 Bytes alignment = kDefaultAlignment);

std::string SerializeRawTrace(const Trace& trace);
std::string SerializePairedTrace(const Trace& trace);

/// Raw op stream (the canonical trace format).
void WriteRawTrace(const Trace& trace, const std::filesystem::path& path);
/// Paired event format; lossless for any valid trace.
void WriteTrace(const Trace& trace, const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& content);

}  // namespace stplan

#endif  // STPLAN_TRACE_IO_H_
