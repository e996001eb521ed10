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

#ifndef STPLAN_INTERVAL_SET_H_
#define STPLAN_INTERVAL_SET_H_

#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "stplan/model.h"

namespace stplan {

/// Half-open address range [lo, hi).
struct Interval {
  Bytes lo = 0;
  Bytes hi = 0;

  Bytes length() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool Overlaps(const Interval& other) const {
    return lo < other.hi && other.lo < hi;
  }
  bool Contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Sorted, pairwise-disjoint, non-adjacent intervals. Every mutating
/// operation restores the invariant; touching ranges are coalesced.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals);
  explicit IntervalSet(Interval interval);

  /// Builds a set from arbitrary (possibly overlapping, unsorted) ranges.
  static IntervalSet FromUnsorted(std::vector<Interval> intervals);

  void Insert(Interval interval);
  void Remove(Interval interval);

  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  std::span<const Interval> intervals() const { return intervals_; }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  Bytes TotalLength() const;
  bool Contains(Bytes addr) const;
  /// True when `interval` lies inside a single member.
  bool ContainsInterval(Interval interval) const;
  bool Intersects(Interval interval) const;
  /// Checks sortedness, disjointness and coalescing.
  bool IsCanonical() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

IntervalSet Intersect(const IntervalSet& x, const IntervalSet& y);
IntervalSet Subtract(const IntervalSet& universe, const IntervalSet& occupied);
IntervalSet Unite(const IntervalSet& x, const IntervalSet& y);

/// Smallest member with length >= size; ties go to the lowest address.
std::optional<Interval> BestFit(const IntervalSet& candidates, Bytes size);

}  // namespace stplan

#endif  // STPLAN_INTERVAL_SET_H_
