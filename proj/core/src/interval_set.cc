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

#include "stplan/interval_set.h"

#include <algorithm>

namespace stplan {

IntervalSet::IntervalSet(std::initializer_list<Interval> intervals) {
  for (const auto& interval : intervals) Insert(interval);
}

IntervalSet::IntervalSet(Interval interval) { Insert(interval); }

IntervalSet IntervalSet::FromUnsorted(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return i.empty(); });
  std::sort(intervals.begin(), intervals.end());
  IntervalSet out;
  for (const auto& interval : intervals) {
    if (!out.intervals_.empty() && interval.lo <= out.intervals_.back().hi) {
      out.intervals_.back().hi = std::max(out.intervals_.back().hi, interval.hi);
    } else {
      out.intervals_.push_back(interval);
    }
  }
  return out;
}

void IntervalSet::Insert(Interval interval) {
  if (interval.empty()) return;
  // First member that overlaps or touches the new range.
  auto first = std::lower_bound(
      intervals_.begin(), intervals_.end(), interval.lo,
      [](const Interval& member, Bytes lo) { return member.hi < lo; });
  auto last = first;
  while (last != intervals_.end() && last->lo <= interval.hi) {
    interval.lo = std::min(interval.lo, last->lo);
    interval.hi = std::max(interval.hi, last->hi);
    ++last;
  }
  auto pos = intervals_.erase(first, last);
  intervals_.insert(pos, interval);
}

void IntervalSet::Remove(Interval interval) {
  if (interval.empty()) return;
  auto first = std::lower_bound(
      intervals_.begin(), intervals_.end(), interval.lo,
      [](const Interval& member, Bytes lo) { return member.hi <= lo; });
  auto last = first;
  std::vector<Interval> leftovers;
  while (last != intervals_.end() && last->lo < interval.hi) {
    if (last->lo < interval.lo) leftovers.push_back({last->lo, interval.lo});
    if (interval.hi < last->hi) leftovers.push_back({interval.hi, last->hi});
    ++last;
  }
  auto pos = intervals_.erase(first, last);
  intervals_.insert(pos, leftovers.begin(), leftovers.end());
}

Bytes IntervalSet::TotalLength() const {
  Bytes total = 0;
  for (const auto& i : intervals_) total += i.length();
  return total;
}

bool IntervalSet::Contains(Bytes addr) const {
  return ContainsInterval({addr, addr + 1});
}

bool IntervalSet::ContainsInterval(Interval interval) const {
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), interval.lo,
      [](Bytes lo, const Interval& member) { return lo < member.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->Contains(interval);
}

bool IntervalSet::Intersects(Interval interval) const {
  auto it = std::lower_bound(
      intervals_.begin(), intervals_.end(), interval.lo,
      [](const Interval& member, Bytes lo) { return member.hi <= lo; });
  return it != intervals_.end() && it->Overlaps(interval);
}

bool IntervalSet::IsCanonical() const {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (intervals_[i].empty()) return false;
    if (i > 0 && intervals_[i - 1].hi >= intervals_[i].lo) return false;
  }
  return true;
}

IntervalSet Intersect(const IntervalSet& x, const IntervalSet& y) {
  std::vector<Interval> out;
  auto a = x.begin();
  auto b = y.begin();
  while (a != x.end() && b != y.end()) {
    Bytes lo = std::max(a->lo, b->lo);
    Bytes hi = std::min(a->hi, b->hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  // Pieces come from disjoint, non-adjacent inputs, so they cannot touch.
  return IntervalSet::FromUnsorted(std::move(out));
}

IntervalSet Subtract(const IntervalSet& universe, const IntervalSet& occupied) {
  std::vector<Interval> out;
  auto b = occupied.begin();
  for (const auto& member : universe) {
    Bytes cursor = member.lo;
    while (b != occupied.end() && b->hi <= cursor) ++b;
    auto scan = b;
    while (scan != occupied.end() && scan->lo < member.hi) {
      if (scan->lo > cursor) out.push_back({cursor, scan->lo});
      cursor = std::max(cursor, scan->hi);
      ++scan;
    }
    if (cursor < member.hi) out.push_back({cursor, member.hi});
  }
  return IntervalSet::FromUnsorted(std::move(out));
}

IntervalSet Unite(const IntervalSet& x, const IntervalSet& y) {
  std::vector<Interval> all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  return IntervalSet::FromUnsorted(std::move(all));
}

std::optional<Interval> BestFit(const IntervalSet& candidates, Bytes size) {
  std::optional<Interval> best;
  for (const auto& interval : candidates) {
    if (interval.length() < size) continue;
    if (!best || interval.length() < best->length()) best = interval;
  }
  return best;
}

}  // namespace stplan
