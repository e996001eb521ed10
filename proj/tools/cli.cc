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

#include "cli.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stplan/caching_allocator.h"
#include "stplan/dynamic_space.h"
#include "stplan/error.h"
#include "stplan/plan_io.h"
#include "stplan/report.h"
#include "stplan/runtime_sim.h"
#include "stplan/static_planner.h"
#include "stplan/svg_timeline.h"
#include "stplan/synth.h"
#include "stplan/trace_io.h"

namespace stplan::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

enum class LogLevel { kQuiet, kInfo, kDebug };

// STPLAN_LOG=quiet|info|debug; unset means quiet.
LogLevel LevelFromEnv() {
  const char* value = std::getenv("STPLAN_LOG");
  if (value == nullptr) return LogLevel::kQuiet;
  std::string level(value);
  if (level == "debug") return LogLevel::kDebug;
  if (level == "info") return LogLevel::kInfo;
  return LogLevel::kQuiet;
}

class Logger {
 public:
  Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
  void Info(const std::string& message) const {
    if (level_ >= LogLevel::kInfo) err_ << "[info] " << message << '\n';
  }
  void Debug(const std::string& message) const {
    if (level_ >= LogLevel::kDebug) err_ << "[debug] " << message << '\n';
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void Table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) {
    out << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

void ReportRows(std::vector<std::pair<std::string, std::string>>& rows,
                const SimReport& r) {
  rows.emplace_back("peak allocated", std::to_string(r.peak_allocated));
  rows.emplace_back("reserved", std::to_string(r.reserved));
  rows.emplace_back("efficiency", Fixed(r.efficiency));
  rows.emplace_back("fragmentation", Fixed(r.fragmentation));
  rows.emplace_back("fallback count", std::to_string(r.fallback_count));
  rows.emplace_back("fallback peak", std::to_string(r.fallback_bytes_peak));
  rows.emplace_back("reuse hits", std::to_string(r.reuse_hits));
  rows.emplace_back("mismatches", std::to_string(r.mismatch_count));
}

std::string StatsJson(const PlannerStats& s, const StaticPlan& plan, Bytes lower_bound) {
  ordered_json j;
  j["pool_size"] = plan.pool_size;
  j["clique_lower_bound"] = lower_bound;
  j["efficiency"] =
      plan.pool_size == 0 ? 1.0
                          : static_cast<double>(lower_bound) / static_cast<double>(plan.pool_size);
  j["decisions"] = plan.decisions.size();
  j["static_events"] = s.static_events;
  j["persistent_events"] = s.persistent_events;
  j["phase_groups"] = s.phase_groups;
  j["fusion_accepted"] = s.fusion_accepted;
  j["fusion_rejected"] = s.fusion_rejected;
  j["fusion_kept"] = s.fusion_kept;
  j["dissolved_groups"] = s.dissolved_groups;
  j["layer_items"] = s.layer_items;
  j["size_classes"] = s.size_classes;
  j["gap_inserted"] = s.gap_inserted;
  j["layers"] = s.layers;
  j["wall_ms"] = s.wall_ms;
  return j.dump(1) + "\n";
}

struct GenArgs {
  std::string preset = "dense";
  std::uint32_t layers = 8;
  std::uint32_t microbatches = 8;
  std::uint64_t seed = 0;
  std::uint32_t chunks = 0;
  std::uint32_t distinct_sizes = 0;
  double transient_ratio = -1.0;
  std::string format = "raw";
  std::string output;
};

struct PlanArgs {
  std::string trace;
  std::string output;
  bool no_fusion = false;
  bool strict_fusion = false;
  bool no_gap_insert = false;
};

struct SimArgs {
  std::string trace;
  std::string plan;
  std::string output;
  std::string log;
  bool no_reuse = false;
};

struct RenderArgs {
  std::string plan;
  std::string trace;
  std::string output;
};

int DoGen(const GenArgs& a, std::ostream& out, const Logger& log) {
  SynthConfig config =
      PresetConfig(ParsePreset(a.preset), a.layers, a.microbatches, a.seed,
                   a.distinct_sizes > 0 ? a.distinct_sizes : SynthConfig{}.distinct_sizes);
  if (a.chunks > 0) config.num_chunks = a.chunks;
  if (a.transient_ratio >= 0.0) config.transient_ratio = a.transient_ratio;
  Trace trace = SynthTrace(config);
  if (a.format == "paired") {
    WriteTrace(trace, a.output);
  } else {
    WriteRawTrace(trace, a.output);
  }
  log.Info("wrote " + std::to_string(trace.events.size()) + " events to " + a.output);
  const auto dynamic = DynamicEvents(trace).size();
  out << "gen " << a.preset << " seed " << a.seed << '\n';
  Table(out, {{"events", std::to_string(trace.events.size())},
              {"static", std::to_string(trace.events.size() - dynamic)},
              {"dynamic", std::to_string(dynamic)},
              {"horizon", std::to_string(trace.horizon)},
              {"phases", std::to_string(trace.phases.size())},
              {"clique lower bound", std::to_string(CliqueLowerBound(trace))}});
  return kOk;
}

int DoPlan(const PlanArgs& a, std::ostream& out, const Logger& log) {
  Trace trace = ParseTrace(a.trace);
  PlannerOptions options;
  options.fusion = !a.no_fusion;
  options.fusion_guard = !a.strict_fusion;
  options.gap_insert = !a.no_gap_insert;
  PlannerStats stats;
  StaticPlanBundle bundle;
  bundle.plan = PlanTrace(trace, options, &stats);
  bundle.reuse = DeriveReuseMap(trace, bundle.plan);
  PlanValidation check = ValidatePlan(bundle.plan);
  if (!check.ok()) throw InternalError("synthesized plan has conflicting decisions");
  WritePlan(bundle, a.output);

  std::filesystem::path sidecar(a.output);
  sidecar.replace_extension(".stats.json");
  const Bytes lower_bound = CliqueLowerBound(StaticEvents(trace));
  WriteFile(sidecar, StatsJson(stats, bundle.plan, lower_bound));
  log.Info("plan written to " + a.output + ", stats to " + sidecar.string());
  log.Debug("planning took " + Fixed(stats.wall_ms, 2) + " ms");

  out << "plan " << a.trace << '\n';
  Table(out, {{"static events", std::to_string(stats.static_events)},
              {"phase groups", std::to_string(stats.phase_groups)},
              {"fusions accepted", std::to_string(stats.fusion_accepted)},
              {"fusions rejected", std::to_string(stats.fusion_rejected)},
              {"fused layout kept", stats.fusion_kept ? "yes" : "no"},
              {"layers", std::to_string(stats.layers)},
              {"pool size", std::to_string(bundle.plan.pool_size)},
              {"lower bound", std::to_string(lower_bound)},
              {"efficiency", Fixed(bundle.plan.pool_size == 0
                                       ? 1.0
                                       : static_cast<double>(lower_bound) /
                                             static_cast<double>(bundle.plan.pool_size))},
              {"reuse groups", std::to_string(bundle.reuse.size())}});
  return kOk;
}

int DoSimulate(const SimArgs& a, std::ostream& out, const Logger& log) {
  Trace trace = ParseTrace(a.trace);
  StaticPlanBundle bundle = ReadPlan(a.plan);
  SimOptions options;
  options.reuse = !a.no_reuse;
  SimResult result = Simulate(trace, bundle.plan, bundle.reuse, options);
  WriteFile(a.output, SerializeReport(result.report));
  if (!a.log.empty()) WriteFile(a.log, SerializeLog(result.log));
  log.Info("report written to " + a.output);
  std::vector<std::pair<std::string, std::string>> rows;
  ReportRows(rows, result.report);
  out << "simulate " << a.trace << (a.no_reuse ? " (no reuse)" : "") << '\n';
  Table(out, rows);
  return kOk;
}

int DoBaseline(const SimArgs& a, std::ostream& out, const Logger& log) {
  Trace trace = ParseTrace(a.trace);
  SimResult result = RunBaseline(trace);
  WriteFile(a.output, SerializeReport(result.report));
  if (!a.log.empty()) WriteFile(a.log, SerializeLog(result.log));
  log.Info("report written to " + a.output);
  std::vector<std::pair<std::string, std::string>> rows;
  ReportRows(rows, result.report);
  out << "baseline " << a.trace << '\n';
  Table(out, rows);
  return kOk;
}

int DoCompare(const SimArgs& a, std::ostream& out, const Logger& log) {
  Trace trace = ParseTrace(a.trace);
  StaticPlanBundle bundle = ReadPlan(a.plan);
  auto baseline = std::async(std::launch::async, [&trace] { return RunBaseline(trace); });
  SimResult planner = Simulate(trace, bundle.plan, bundle.reuse);
  CompareReport compare = MakeCompare(planner.report, baseline.get().report);
  WriteFile(a.output, SerializeCompare(compare));
  log.Info("comparison written to " + a.output);
  out << "compare " << a.trace << '\n';
  Table(out, {{"planner reserved", std::to_string(compare.planner.reserved)},
              {"baseline reserved", std::to_string(compare.baseline.reserved)},
              {"planner efficiency", Fixed(compare.planner.efficiency)},
              {"baseline efficiency", Fixed(compare.baseline.efficiency)},
              {"fragmentation reduction",
               compare.fragmentation_reduction ? Fixed(*compare.fragmentation_reduction)
                                               : "n/a"},
              {"memory saved", std::to_string(compare.memory_saved_bytes)}});
  return kOk;
}

int DoRender(const RenderArgs& a, std::ostream& out, const Logger& log) {
  StaticPlanBundle bundle = ReadPlan(a.plan);
  std::vector<LogEntry> sim_log;
  if (!a.trace.empty()) {
    Trace trace = ParseTrace(a.trace);
    sim_log = Simulate(trace, bundle.plan, bundle.reuse).log;
  }
  WriteFile(a.output, RenderTimeline(bundle, sim_log));
  log.Info("timeline written to " + a.output);
  out << "render " << a.plan << ": " << bundle.plan.decisions.size() << " decisions\n";
  return kOk;
}

void PrintError(std::ostream& err, const char* kind, const std::string& message) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << '\n';
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Logger log(err, LevelFromEnv());
  CLI::App app{"Spatio-temporal GPU memory allocation planner and simulator", "stplan"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic training trace");
  gen_cmd->add_option("--preset", gen.preset,
                      "dense, dense_recompute, dense_vpp, dense_vpp_recompute, moe, "
                      "moe_recompute");
  gen_cmd->add_option("--layers", gen.layers, "Number of layers");
  gen_cmd->add_option("--microbatches", gen.microbatches, "Microbatches per iteration");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--chunks", gen.chunks, "Virtual pipeline chunks (preset default)");
  gen_cmd->add_option("--distinct-sizes", gen.distinct_sizes, "Activation palette size");
  gen_cmd->add_option("--transient-ratio", gen.transient_ratio,
                      "Share of activations preceded by a temporary");
  gen_cmd->add_option("--format", gen.format, "raw or paired")
      ->check(CLI::IsMember({"raw", "paired"}));
  gen_cmd->add_option("-o,--output", gen.output, "Trace file")->required();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Synthesize a static allocation plan");
  plan_cmd->add_option("trace", plan.trace, "Trace file")->required();
  plan_cmd->add_option("-o,--output", plan.output, "Plan file")->required();
  plan_cmd->add_flag("--no-fusion", plan.no_fusion, "Disable local-plan fusion");
  plan_cmd->add_flag("--strict-fusion", plan.strict_fusion,
                     "Keep the fused layout even when the unfused one is smaller");
  plan_cmd->add_flag("--no-gap-insert", plan.no_gap_insert,
                     "Disable insertion into gaps of larger layers");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Replay a trace against a plan");
  sim_cmd->add_option("trace", sim.trace, "Trace file")->required();
  sim_cmd->add_option("--plan", sim.plan, "Plan file")->required();
  sim_cmd->add_option("-o,--output", sim.output, "Report file")->required();
  sim_cmd->add_option("--log", sim.log, "Also write the event log (JSON lines)");
  sim_cmd->add_flag("--no-reuse", sim.no_reuse, "Send every dynamic request to fallback");

  SimArgs base;
  auto* base_cmd = app.add_subcommand("baseline", "Replay a trace through the caching allocator");
  base_cmd->add_option("trace", base.trace, "Trace file")->required();
  base_cmd->add_option("-o,--output", base.output, "Report file")->required();
  base_cmd->add_option("--log", base.log, "Also write the event log (JSON lines)");

  SimArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Planner versus caching allocator");
  cmp_cmd->add_option("trace", cmp.trace, "Trace file")->required();
  cmp_cmd->add_option("--plan", cmp.plan, "Plan file")->required();
  cmp_cmd->add_option("-o,--output", cmp.output, "Comparison file")->required();

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Draw a plan as an SVG timeline");
  render_cmd->add_option("plan", render.plan, "Plan file")->required();
  render_cmd->add_option("--trace", render.trace, "Trace to simulate for the fallback band");
  render_cmd->add_option("-o,--output", render.output, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    PrintError(err, "usage", e.what());
    return kValidationFailure;
  }

  try {
    if (gen_cmd->parsed()) return DoGen(gen, out, log);
    if (plan_cmd->parsed()) return DoPlan(plan, out, log);
    if (sim_cmd->parsed()) return DoSimulate(sim, out, log);
    if (base_cmd->parsed()) return DoBaseline(base, out, log);
    if (cmp_cmd->parsed()) return DoCompare(cmp, out, log);
    if (render_cmd->parsed()) return DoRender(render, out, log);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kValidation:
        PrintError(err, "validation", e.what());
        return kValidationFailure;
      case ErrorKind::kIo:
        PrintError(err, "io", e.what());
        return kIoFailure;
      case ErrorKind::kInternal:
        PrintError(err, "internal", e.what());
        return kInternalFailure;
    }
  } catch (const std::exception& e) {
    PrintError(err, "internal", e.what());
    return kInternalFailure;
  }
  return kOk;
}

}  // namespace stplan::cli
