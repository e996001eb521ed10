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

#include "stplan/trace_io.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "stplan/error.h"

namespace stplan {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

std::string Where(std::span<const std::size_t> lines, std::size_t index) {
  if (index < lines.size()) return "line " + std::to_string(lines[index]) + ": ";
  return "record " + std::to_string(index) + ": ";
}

template <typename T>
T Field(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!it->is_number_unsigned()) {
      throw ValidationError(std::string("field '") + key +
                            "' must be a non-negative integer");
    }
  } else if constexpr (std::is_same_v<T, std::int64_t>) {
    if (!it->is_number_integer()) {
      throw ValidationError(std::string("field '") + key + "' must be an integer");
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) {
      throw ValidationError(std::string("field '") + key + "' must be a string");
    }
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) {
      throw ValidationError(std::string("field '") + key + "' must be a boolean");
    }
  }
  return it->get<T>();
}

RawOpRecord ParseRawRecord(const json& object) {
  if (!object.is_object()) throw ValidationError("record is not an object");
  RawOpRecord record;
  const std::string op = Field<std::string>(object, "op");
  if (op == "alloc") {
    record.op = RawOp::kAlloc;
  } else if (op == "free") {
    record.op = RawOp::kFree;
  } else {
    throw ValidationError("unknown op '" + op + "'");
  }
  record.id = Field<std::uint64_t>(object, "id");
  if (record.op == RawOp::kAlloc) record.size = Field<std::uint64_t>(object, "size");
  record.phase = PhaseId::Parse(Field<std::string>(object, "phase"));
  if (object.contains("module")) record.module = Field<std::string>(object, "module");
  if (record.op == RawOp::kAlloc && object.contains("dynamic")) {
    record.dynamic = Field<bool>(object, "dynamic");
  }
  return record;
}

void CheckVersion(const json& header) {
  const auto version = Field<std::int64_t>(header, "version");
  if (version != kTraceSchemaVersion) {
    throw ValidationError("unsupported trace schema version " +
                          std::to_string(version));
  }
}

Trace ReadPaired(const json& header, const std::vector<std::string>& lines,
                 const std::vector<std::size_t>& line_numbers) {
  Trace trace;
  trace.horizon = Field<std::int64_t>(header, "horizon");
  for (const auto& entry : header.at("phases")) {
    trace.phases.push_back({PhaseId::Parse(entry.at(0).get<std::string>()),
                            entry.at(1).get<Timestamp>(),
                            entry.at(2).get<Timestamp>()});
  }
  for (const auto& entry : header.at("layers")) {
    trace.layers.push_back({entry.at(0).get<std::string>(),
                            entry.at(1).get<Timestamp>(),
                            entry.at(2).get<Timestamp>()});
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      json object = json::parse(lines[i]);
      MemoryRequestEvent e;
      e.id = Field<std::uint64_t>(object, "id");
      e.size = Field<std::uint64_t>(object, "size");
      e.t_s = Field<std::int64_t>(object, "t_s");
      e.t_e = Field<std::int64_t>(object, "t_e");
      e.p_s = PhaseId::Parse(Field<std::string>(object, "p_s"));
      e.p_e = PhaseId::Parse(Field<std::string>(object, "p_e"));
      e.dynamic = Field<bool>(object, "dynamic");
      if (object.contains("l_s") && !object["l_s"].is_null()) {
        e.l_s = Field<std::string>(object, "l_s");
      }
      if (object.contains("l_e") && !object["l_e"].is_null()) {
        e.l_e = Field<std::string>(object, "l_e");
      }
      trace.events.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ValidationError(Where(line_numbers, i) + "malformed event: " + ex.what());
    } catch (const Error& ex) {
      throw ValidationError(Where(line_numbers, i) + ex.what());
    }
  }
  std::sort(trace.events.begin(), trace.events.end(),
            [](const MemoryRequestEvent& a, const MemoryRequestEvent& b) {
              return std::tie(a.t_s, a.id) < std::tie(b.t_s, b.id);
            });
  ValidateTrace(trace);
  return trace;
}

}  // namespace

Trace PairRecords(std::span<const RawOpRecord> records,
                  std::optional<Timestamp> horizon, Bytes alignment,
                  std::span<const std::size_t> lines) {
  Trace trace;
  const auto n = static_cast<Timestamp>(records.size());
  trace.horizon = horizon.value_or(n);
  if (trace.horizon < n) {
    throw ValidationError("horizon " + std::to_string(trace.horizon) +
                          " is shorter than the " + std::to_string(n) +
                          " records");
  }

  std::set<PhaseId> finished_phases;
  std::set<RequestId> seen;
  std::map<RequestId, std::size_t> open;  // id -> index in trace.events
  bool in_layer = false;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawOpRecord& r = records[i];
    const auto t = static_cast<Timestamp>(i);

    if (trace.phases.empty() || trace.phases.back().phase != r.phase) {
      if (!trace.phases.empty()) finished_phases.insert(trace.phases.back().phase);
      if (finished_phases.contains(r.phase)) {
        throw ValidationError(Where(lines, i) + "phase " + r.phase.Tag() +
                              " reappears after another phase");
      }
      trace.phases.push_back({r.phase, t, t + 1});
      in_layer = false;
    } else {
      trace.phases.back().end = t + 1;
    }

    if (r.module.empty()) {
      in_layer = false;
    } else {
      std::string name = LayerInstanceName(r.module, r.phase);
      if (in_layer && trace.layers.back().name == name) {
        trace.layers.back().end = t + 1;
      } else {
        trace.layers.push_back({std::move(name), t, t + 1});
        in_layer = true;
      }
    }

    if (r.op == RawOp::kAlloc) {
      if (!seen.insert(r.id).second) {
        throw ValidationError(Where(lines, i) + "duplicate alloc id " +
                              std::to_string(r.id));
      }
      if (r.size == 0) throw ValidationError(Where(lines, i) + "zero-size alloc");
      if (r.dynamic && r.module.empty()) {
        throw ValidationError(Where(lines, i) + "dynamic event missing layer");
      }
      MemoryRequestEvent e;
      e.id = r.id;
      e.size = AlignUp(r.size, alignment);
      e.t_s = t;
      e.p_s = r.phase;
      e.dynamic = r.dynamic;
      if (r.dynamic) e.l_s = LayerInstanceName(r.module, r.phase);
      open[r.id] = trace.events.size();
      trace.events.push_back(std::move(e));
    } else {
      auto it = open.find(r.id);
      if (it == open.end()) {
        throw ValidationError(Where(lines, i) + "free without matching alloc id " +
                              std::to_string(r.id));
      }
      MemoryRequestEvent& e = trace.events[it->second];
      e.t_e = t;
      e.p_e = r.phase;
      if (e.dynamic) {
        if (r.module.empty()) {
          throw ValidationError(Where(lines, i) + "dynamic event missing layer");
        }
        e.l_e = LayerInstanceName(r.module, r.phase);
      }
      open.erase(it);
    }
  }

  for (const auto& [id, index] : open) {
    MemoryRequestEvent& e = trace.events[index];
    if (e.dynamic) {
      throw ValidationError("dynamic event " + std::to_string(id) +
                            " missing layer: never freed");
    }
    e.t_e = trace.horizon;
    e.p_e = trace.phases.back().phase;
  }
  ValidateTrace(trace);
  return trace;
}

std::vector<RawOpRecord> ToRawRecords(const Trace& trace) {
  std::vector<std::optional<RawOpRecord>> slots(
      static_cast<std::size_t>(std::max<Timestamp>(trace.horizon, 0)));
  auto module_at = [&trace](Timestamp t) -> std::string {
    auto it = std::upper_bound(
        trace.layers.begin(), trace.layers.end(), t,
        [](Timestamp value, const LayerSpan& layer) { return value < layer.start; });
    if (it == trace.layers.begin()) return {};
    --it;
    if (t >= it->end) return {};
    return std::string(ModuleOfLayerInstance(it->name));
  };
  auto place = [&slots](Timestamp t, RawOpRecord record) {
    auto& slot = slots.at(static_cast<std::size_t>(t));
    if (slot) {
      throw ValidationError("two operations at timestamp " + std::to_string(t));
    }
    slot = std::move(record);
  };
  for (const auto& e : trace.events) {
    place(e.t_s, {RawOp::kAlloc, e.id, e.size, e.p_s, module_at(e.t_s), e.dynamic});
    if (e.t_e < trace.horizon) {
      place(e.t_e, {RawOp::kFree, e.id, 0, e.p_e, module_at(e.t_e), false});
    }
  }
  while (!slots.empty() && !slots.back()) slots.pop_back();
  std::vector<RawOpRecord> records;
  records.reserve(slots.size());
  for (std::size_t t = 0; t < slots.size(); ++t) {
    if (!slots[t]) {
      throw ValidationError("timestamp " + std::to_string(t) +
                            " has no operation; trace is not a raw stream");
    }
    records.push_back(std::move(*slots[t]));
  }
  return records;
}

Trace ReadTrace(std::istream& in, Bytes alignment) {
  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(std::move(line));
    line_numbers.push_back(number);
  }

  json header;
  std::size_t first = 0;
  if (!lines.empty()) {
    json object;
    try {
      object = json::parse(lines[0]);
    } catch (const json::exception& ex) {
      throw ValidationError(Where(line_numbers, 0) + "malformed JSON: " + ex.what());
    }
    if (object.is_object() && object.contains("version") && !object.contains("op")) {
      try {
        CheckVersion(object);
      } catch (const Error& ex) {
        throw ValidationError(Where(line_numbers, 0) + ex.what());
      }
      header = std::move(object);
      first = 1;
    }
  }
  const std::string format =
      header.is_object() ? header.value("format", std::string("raw")) : "raw";
  std::vector<std::string> body(lines.begin() + static_cast<std::ptrdiff_t>(first),
                                lines.end());
  std::vector<std::size_t> body_lines(
      line_numbers.begin() + static_cast<std::ptrdiff_t>(first), line_numbers.end());

  if (format == "paired") {
    try {
      return ReadPaired(header, body, body_lines);
    } catch (const json::exception& ex) {
      throw ValidationError(std::string("malformed paired trace header: ") + ex.what());
    }
  }
  if (format != "raw") throw ValidationError("unknown trace format '" + format + "'");

  std::vector<RawOpRecord> records;
  records.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    try {
      records.push_back(ParseRawRecord(json::parse(body[i])));
    } catch (const json::exception& ex) {
      throw ValidationError(Where(body_lines, i) + "malformed JSON: " + ex.what());
    } catch (const Error& ex) {
      throw ValidationError(Where(body_lines, i) + ex.what());
    }
  }
  std::optional<Timestamp> horizon;
  if (header.is_object() && header.contains("horizon")) {
    horizon = Field<std::int64_t>(header, "horizon");
  }
  return PairRecords(records, horizon, alignment, body_lines);
}

Trace ParseTrace(const std::filesystem::path& path, Bytes alignment) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path.string() + "'");
  return ReadTrace(in, alignment);
}

std::string SerializeRawTrace(const Trace& trace) {
  std::string out;
  ordered_json header;
  header["version"] = kTraceSchemaVersion;
  header["format"] = "raw";
  header["horizon"] = trace.horizon;
  out += header.dump();
  out += '\n';
  for (const RawOpRecord& r : ToRawRecords(trace)) {
    ordered_json line;
    line["op"] = r.op == RawOp::kAlloc ? "alloc" : "free";
    line["id"] = r.id;
    if (r.op == RawOp::kAlloc) line["size"] = r.size;
    line["phase"] = r.phase.Tag();
    line["module"] = r.module;
    if (r.op == RawOp::kAlloc) line["dynamic"] = r.dynamic;
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string SerializePairedTrace(const Trace& trace) {
  std::string out;
  ordered_json header;
  header["version"] = kTraceSchemaVersion;
  header["format"] = "paired";
  header["horizon"] = trace.horizon;
  header["phases"] = ordered_json::array();
  for (const auto& p : trace.phases) {
    header["phases"].push_back({p.phase.Tag(), p.start, p.end});
  }
  header["layers"] = ordered_json::array();
  for (const auto& l : trace.layers) {
    header["layers"].push_back({l.name, l.start, l.end});
  }
  out += header.dump();
  out += '\n';
  for (const auto& e : trace.events) {
    ordered_json line;
    line["id"] = e.id;
    line["size"] = e.size;
    line["t_s"] = e.t_s;
    line["t_e"] = e.t_e;
    line["p_s"] = e.p_s.Tag();
    line["p_e"] = e.p_e.Tag();
    line["dynamic"] = e.dynamic;
    line["l_s"] = e.l_s ? ordered_json(*e.l_s) : ordered_json(nullptr);
    line["l_e"] = e.l_e ? ordered_json(*e.l_e) : ordered_json(nullptr);
    out += line.dump();
    out += '\n';
  }
  return out;
}

void WriteRawTrace(const Trace& trace, const std::filesystem::path& path) {
  WriteFile(path, SerializeRawTrace(trace));
}

void WriteTrace(const Trace& trace, const std::filesystem::path& path) {
  WriteFile(path, SerializePairedTrace(trace));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace stplan
