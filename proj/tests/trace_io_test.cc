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

#include <gtest/gtest.h>

#include <sstream>

#include "stplan/error.h"
#include "stplan/synth.h"

namespace stplan {
namespace {

Trace Read(const std::string& text) {
  std::istringstream in(text);
  return ReadTrace(in);
}

std::string ErrorOf(const std::string& text) {
  try {
    Read(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    return e.what();
  }
  return "";
}

TEST(ReadTraceTest, PairsAllocAndFree) {
  Trace t = Read(
      R"({"op":"alloc","id":1,"size":1024,"phase":"F:0"})"
      "\n"
      R"({"op":"free","id":1,"phase":"B:0"})"
      "\n");
  ASSERT_EQ(t.events.size(), 1u);
  const auto& e = t.events[0];
  EXPECT_EQ(e.size, 1024u);
  EXPECT_EQ(e.t_s, 0);
  EXPECT_EQ(e.t_e, 1);
  EXPECT_EQ(e.p_s, PhaseId::Forward(0));
  EXPECT_EQ(e.p_e, PhaseId::Backward(0));
  EXPECT_FALSE(e.dynamic);
  EXPECT_EQ(t.horizon, 2);
}

TEST(ReadTraceTest, UnfreedAllocSpansHorizon) {
  Trace t = Read(
      R"({"version":1,"format":"raw","horizon":100})"
      "\n"
      R"({"op":"alloc","id":1,"size":100,"phase":"init"})"
      "\n");
  ASSERT_EQ(t.events.size(), 1u);
  EXPECT_EQ(t.events[0].t_e, 100);
  EXPECT_EQ(t.events[0].p_e, PhaseId::Init());
  EXPECT_EQ(t.events[0].size, 512u);  // aligned at ingestion
}

TEST(ReadTraceTest, DynamicAllocNeedsModule) {
  EXPECT_NE(ErrorOf(R"({"op":"alloc","id":1,"size":8,"phase":"F:0","dynamic":true})"
                    "\n")
                .find("dynamic event missing layer"),
            std::string::npos);
}

TEST(ReadTraceTest, DynamicEventsCarryLayerInstances) {
  Trace t = Read(
      R"({"op":"alloc","id":1,"size":8,"phase":"F:0","module":"moe.1","dynamic":true})"
      "\n"
      R"({"op":"free","id":1,"phase":"B:0","module":"moe.1"})"
      "\n");
  ASSERT_EQ(t.events.size(), 1u);
  EXPECT_EQ(t.events[0].l_s, "moe.1@F:0");
  EXPECT_EQ(t.events[0].l_e, "moe.1@B:0");
  ASSERT_EQ(t.layers.size(), 2u);
}

TEST(ReadTraceTest, ReportsLineNumbers) {
  const std::string text =
      R"({"op":"alloc","id":1,"size":8,"phase":"F:0"})"
      "\n\n"
      "{not json\n";
  EXPECT_NE(ErrorOf(text).find("line 3"), std::string::npos) << ErrorOf(text);
}

TEST(ReadTraceTest, RejectsPairingErrors) {
  EXPECT_NE(ErrorOf(R"({"op":"free","id":4,"phase":"F:0"})"
                    "\n")
                .find("free without matching alloc"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"op":"alloc","id":1,"size":8,"phase":"F:0"})"
                    "\n"
                    R"({"op":"alloc","id":1,"size":8,"phase":"F:0"})"
                    "\n")
                .find("duplicate alloc id"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"op":"alloc","id":1,"size":0,"phase":"F:0"})"
                    "\n")
                .find("zero-size"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"op":"alloc","id":1,"size":8,"phase":"F:0"})"
                    "\n"
                    R"({"op":"alloc","id":2,"size":8,"phase":"B:0"})"
                    "\n"
                    R"({"op":"alloc","id":3,"size":8,"phase":"F:0"})"
                    "\n")
                .find("reappears"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"op":"alloc","id":-1,"size":8,"phase":"F:0"})"
                    "\n")
                .find("line 1"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"op":"move","id":1,"phase":"F:0"})"
                    "\n")
                .find("unknown op"),
            std::string::npos);
}

TEST(ReadTraceTest, RejectsUnknownVersion) {
  EXPECT_NE(ErrorOf(R"({"version":2,"format":"raw"})"
                    "\n")
                .find("unsupported"),
            std::string::npos);
}

TEST(ReadTraceTest, PairingPreservesCounts) {
  for (Preset p : kAllPresets) {
    auto records = SynthRecords(PresetConfig(p, 4, 3, 5));
    std::size_t allocs = 0;
    for (const auto& r : records) allocs += r.op == RawOp::kAlloc;
    Trace t = PairRecords(records);
    EXPECT_EQ(t.events.size(), allocs) << PresetName(p);
  }
}

TEST(TraceRoundTripTest, RawFormatIsByteStable) {
  for (Preset p : kAllPresets) {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      Trace t = SynthTrace(PresetConfig(p, 4, 3, seed));
      const std::string text = SerializeRawTrace(t);
      Trace back = Read(text);
      EXPECT_EQ(back, t) << PresetName(p);
      EXPECT_EQ(SerializeRawTrace(back), text);
      EXPECT_EQ(ToRawRecords(t), SynthRecords(PresetConfig(p, 4, 3, seed)));
    }
  }
}

TEST(TraceRoundTripTest, PairedFormatIsByteStable) {
  for (Preset p : kAllPresets) {
    Trace t = SynthTrace(PresetConfig(p, 3, 2, 4));
    const std::string text = SerializePairedTrace(t);
    Trace back = Read(text);
    EXPECT_EQ(back, t) << PresetName(p);
    EXPECT_EQ(SerializePairedTrace(back), text);
  }
}

TEST(TraceFilesTest, MissingFileIsIoError) {
  try {
    ParseTrace("/nonexistent/trace.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace stplan
