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

// Online caching allocator: best fit over cached free blocks, split on
// allocation, merge with free neighbours of the same segment on release.
// Segments are reserved on a miss and never returned.

#ifndef STPLAN_CACHING_ALLOCATOR_H_
#define STPLAN_CACHING_ALLOCATOR_H_

#include <cstddef>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

#include "stplan/model.h"
#include "stplan/report.h"

namespace stplan {

inline constexpr Bytes kDefaultMinSegment = Bytes{2} << 20;

class CachingAllocator {
 public:
  struct Placement {
    Bytes addr = 0;
    Bytes reserved = 0;  // bytes of the segment opened for this request, or 0
  };

  /// Segments are laid out upward from `base`.
  explicit CachingAllocator(Bytes base = 0, Bytes min_segment = kDefaultMinSegment,
                            Bytes alignment = kDefaultAlignment);

  struct Released {
    Bytes addr = 0;
    Bytes size = 0;
  };

  Placement Allocate(RequestId id, Bytes size);
  /// Throws ValidationError for an id that is not live.
  Released Free(RequestId id);

  bool Owns(RequestId id) const { return live_.contains(id); }
  Bytes reserved() const { return reserved_; }
  Bytes allocated() const { return allocated_; }
  std::size_t segment_count() const { return segments_; }
  /// Cached free blocks as (addr, size), in address order.
  std::vector<std::pair<Bytes, Bytes>> FreeBlocks() const;

 private:
  struct Block {
    Bytes size = 0;
    std::size_t segment = 0;
    bool free = true;
  };

  void MarkFree(Bytes addr, Block& block);

  Bytes base_;
  Bytes min_segment_;
  Bytes alignment_;
  Bytes reserved_ = 0;
  Bytes allocated_ = 0;
  std::size_t segments_ = 0;
  std::map<Bytes, Block> blocks_;              // every block, by address
  std::set<std::pair<Bytes, Bytes>> by_size_;  // free blocks as (size, addr)
  std::unordered_map<RequestId, Bytes> live_;  // id -> block address
};

/// Replays `trace` through a fresh CachingAllocator based at address 0.
SimResult RunBaseline(const Trace& trace, Bytes min_segment = kDefaultMinSegment);

}  // namespace stplan

#endif  // STPLAN_CACHING_ALLOCATOR_H_
