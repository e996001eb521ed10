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

#include "stplan/caching_allocator.h"

#include <gtest/gtest.h>

#include <random>

#include "stplan/error.h"
#include "stplan/trace_io.h"

namespace stplan {
namespace {

constexpr Bytes kMiB = 1 << 20;

struct Op {
  bool alloc;
  RequestId id;
  Bytes size;
};

Trace TraceOf(const std::vector<Op>& ops) {
  std::vector<RawOpRecord> records;
  for (const Op& op : ops) {
    RawOpRecord r;
    r.op = op.alloc ? RawOp::kAlloc : RawOp::kFree;
    r.id = op.id;
    r.size = op.alloc ? op.size : 0;
    r.phase = PhaseId::Forward(0);
    r.module = "m";
    records.push_back(r);
  }
  return PairRecords(records);
}

TEST(CachingAllocatorTest, DisjointEqualSizesReuseOneSegment) {
  std::vector<Op> ops;
  for (RequestId id = 1; id <= 5; ++id) {
    ops.push_back({true, id, 2 * kMiB});
    ops.push_back({false, id, 0});
  }
  auto result = RunBaseline(TraceOf(ops));
  EXPECT_EQ(result.report.reserved, 2 * kMiB);
  EXPECT_DOUBLE_EQ(result.report.efficiency, 1.0);
  EXPECT_EQ(result.report.allocator, "baseline");
}

// Sizes A, B, A, B with staggered frees. Hand replay with 4 KiB segments:
//   1:A@0, 2:B@1024, free 1 -> holes [0,1024) and [3072,4096)
//   3:B misses both holes and opens [4096,8192) -> @4096
//   4:A@0 (best fit, lowest address), free 2 merges into [1024,4096)
//   5:B@6144 (2048 hole beats 3072), 6:A@1024
// Peak live is 6144 of 8192 reserved.
TEST(CachingAllocatorTest, StaggeredFreesFragment) {
  constexpr Bytes A = 1024, B = 2048;
  std::vector<Op> ops = {{true, 1, A},  {true, 2, B},  {false, 1, 0}, {true, 3, B},
                         {true, 4, A},  {false, 2, 0}, {true, 5, B},  {true, 6, A},
                         {false, 3, 0}, {false, 4, 0}, {false, 5, 0}, {false, 6, 0}};
  Trace trace = TraceOf(ops);
  auto result = RunBaseline(trace, 4096);
  std::map<RequestId, Bytes> addr;
  for (const auto& e : result.log) {
    if (e.op == LogOp::kAlloc) addr[e.id] = e.addr;
  }
  EXPECT_EQ(addr, (std::map<RequestId, Bytes>{
                      {1, 0}, {2, 1024}, {3, 4096}, {4, 0}, {5, 6144}, {6, 1024}}));
  EXPECT_EQ(result.report.peak_allocated, 6144u);
  EXPECT_EQ(result.report.reserved, 8192u);
  EXPECT_DOUBLE_EQ(result.report.efficiency, 0.75);
  EXPECT_LT(RunBaseline(trace).report.efficiency, 1.0);
}

TEST(CachingAllocatorTest, SplitAndMerge) {
  CachingAllocator a(0, 4096, 512);
  EXPECT_EQ(a.Allocate(1, 1000).addr, 0u);  // rounded to 1024
  EXPECT_EQ(a.Allocate(2, 512).addr, 1024u);
  EXPECT_EQ(a.FreeBlocks(), (std::vector<std::pair<Bytes, Bytes>>{{1536, 2560}}));
  auto released = a.Free(1);
  EXPECT_EQ(released.addr, 0u);
  EXPECT_EQ(released.size, 1024u);
  a.Free(2);
  EXPECT_EQ(a.FreeBlocks(), (std::vector<std::pair<Bytes, Bytes>>{{0, 4096}}));
  EXPECT_EQ(a.allocated(), 0u);
  EXPECT_EQ(a.reserved(), 4096u);
}

TEST(CachingAllocatorTest, NoMergeAcrossSegments) {
  CachingAllocator a(0, 4096, 512);
  a.Allocate(1, 4096);
  a.Allocate(2, 4096);
  EXPECT_EQ(a.segment_count(), 2u);
  a.Free(1);
  a.Free(2);
  EXPECT_EQ(a.FreeBlocks(),
            (std::vector<std::pair<Bytes, Bytes>>{{0, 4096}, {4096, 4096}}));
  // A request larger than any segment opens a power-of-two one.
  auto p = a.Allocate(3, 5000);
  EXPECT_EQ(p.addr, 8192u);
  EXPECT_EQ(p.reserved, 8192u);
}

TEST(CachingAllocatorTest, Errors) {
  CachingAllocator a;
  a.Allocate(1, 512);
  EXPECT_THROW(a.Allocate(1, 512), Error);
  EXPECT_THROW(a.Allocate(2, 0), Error);
  a.Free(1);
  EXPECT_THROW(a.Free(1), Error);
  EXPECT_THROW(a.Free(9), Error);
}

TEST(CachingAllocatorProperty, ReservedNeverShrinksAndBoundsTheClique) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    std::vector<Op> ops;
    std::vector<RequestId> live;
    RequestId next = 1;
    for (int step = 0; step < 60; ++step) {
      if (!live.empty() && rng() % 3 == 0) {
        std::size_t i = rng() % live.size();
        ops.push_back({false, live[i], 0});
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ops.push_back({true, next, 512 * (1 + rng() % 4096)});
        live.push_back(next++);
      }
    }
    Trace trace = TraceOf(ops);
    auto result = RunBaseline(trace);
    Bytes reserved = 0;
    for (const auto& e : result.log) {
      if (e.op == LogOp::kReserve) {
        ASSERT_GT(e.size, 0u);
        reserved += e.size;
      }
    }
    ASSERT_EQ(reserved, result.report.reserved);
    ASSERT_GE(result.report.reserved, CliqueLowerBound(trace));
    ASSERT_EQ(RunBaseline(trace).report, result.report);
  }
}

}  // namespace
}  // namespace stplan
