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

#include <algorithm>
#include <bit>

#include "stplan/error.h"

namespace stplan {

CachingAllocator::CachingAllocator(Bytes base, Bytes min_segment, Bytes alignment)
    : base_(base), min_segment_(min_segment), alignment_(alignment) {}

CachingAllocator::Placement CachingAllocator::Allocate(RequestId id, Bytes size) {
  if (size == 0) throw ValidationError("zero-size allocation");
  if (live_.contains(id)) {
    throw ValidationError("request " + std::to_string(id) + " is already live");
  }
  size = AlignUp(size, alignment_);
  Placement placement;
  auto fit = by_size_.lower_bound({size, 0});
  Bytes addr = 0;
  if (fit != by_size_.end()) {
    addr = fit->second;
    by_size_.erase(fit);
  } else {
    const Bytes segment = std::max(min_segment_, std::bit_ceil(size));
    addr = base_ + reserved_;
    blocks_.emplace(addr, Block{segment, segments_++, true});
    reserved_ += segment;
    placement.reserved = segment;
  }
  Block& block = blocks_.at(addr);
  if (block.size > size) {
    Block rest{block.size - size, block.segment, true};
    blocks_.emplace(addr + size, rest);
    by_size_.insert({rest.size, addr + size});
    block.size = size;
  }
  block.free = false;
  live_.emplace(id, addr);
  allocated_ += size;
  placement.addr = addr;
  return placement;
}

CachingAllocator::Released CachingAllocator::Free(RequestId id) {
  auto it = live_.find(id);
  if (it == live_.end()) {
    throw ValidationError("free of unknown or already freed request " +
                          std::to_string(id));
  }
  const Bytes addr = it->second;
  live_.erase(it);
  Block& block = blocks_.at(addr);
  const Bytes size = block.size;
  allocated_ -= size;
  MarkFree(addr, block);
  return {addr, size};
}

void CachingAllocator::MarkFree(Bytes addr, Block& block) {
  block.free = true;
  auto self = blocks_.find(addr);
  auto next = std::next(self);
  if (next != blocks_.end() && next->second.free &&
      next->second.segment == block.segment) {
    by_size_.erase({next->second.size, next->first});
    block.size += next->second.size;
    blocks_.erase(next);
  }
  if (self != blocks_.begin()) {
    auto prev = std::prev(self);
    if (prev->second.free && prev->second.segment == block.segment) {
      by_size_.erase({prev->second.size, prev->first});
      prev->second.size += block.size;
      blocks_.erase(self);
      by_size_.insert({prev->second.size, prev->first});
      return;
    }
  }
  by_size_.insert({block.size, addr});
}

std::vector<std::pair<Bytes, Bytes>> CachingAllocator::FreeBlocks() const {
  std::vector<std::pair<Bytes, Bytes>> out;
  for (const auto& [addr, block] : blocks_) {
    if (block.free) out.emplace_back(addr, block.size);
  }
  return out;
}

SimResult RunBaseline(const Trace& trace, Bytes min_segment) {
  CachingAllocator allocator(0, min_segment);
  SimResult result;
  for (const ReplayOp& op : ReplayOrder(trace)) {
    const MemoryRequestEvent& e = trace.events[op.event];
    if (op.free) {
      auto released = allocator.Free(e.id);
      result.log.push_back(
          {op.t, LogOp::kFree, e.id, released.addr, e.size, Route::kFallback});
      continue;
    }
    auto placement = allocator.Allocate(e.id, e.size);
    if (placement.reserved > 0) {
      result.log.push_back({op.t, LogOp::kReserve, e.id,
                            allocator.reserved() - placement.reserved,
                            placement.reserved, Route::kFallback});
    }
    result.log.push_back(
        {op.t, LogOp::kAlloc, e.id, placement.addr, e.size, Route::kFallback});
  }
  result.report = ComputeMetrics(result.log, 0, "baseline");
  return result;
}

}  // namespace stplan
