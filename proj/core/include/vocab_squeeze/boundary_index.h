// Copyright 2020 The Authors.
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

#ifndef VOCAB_SQUEEZE_BOUNDARY_INDEX_H_
#define VOCAB_SQUEEZE_BOUNDARY_INDEX_H_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "vocab_squeeze/bit_tree_set.h"
#include "vocab_squeeze/ingest.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze {

// Cumulative mass tables over sorted positions first()..last():
//   cum_mass(i)    = P(X among the first i sorted values)
//   cum_c0_mass(i) = P(X among the first i sorted values, C = 0)
// Count-backed features keep exact integer prefix sums, so block statistics
// are formed from integer differences and normalized once.
class PrefixTables {
 public:
  // Mass and P(C=0 | block) of sorted values a+1..b.
  struct Block {
    double mass = 0.0;
    double cond = 0.0;
  };

  PrefixTables() = default;

  // Entries 0..n.
  static PrefixTables FromFeature(const SortedFeature& feature);
  // Entries lo..hi only. Each entry is still the absolute cumulative value,
  // seeded from a single running offset, so the table size is hi - lo + 1.
  static PrefixTables FromFeatureRange(const SortedFeature& feature,
                                       std::size_t lo, std::size_t hi);

  std::size_t first() const { return first_; }
  std::size_t last() const { return first_ + num_entries() - 1; }
  std::size_t num_entries() const;
  bool exact() const { return !cum_count_.empty(); }

  double cum_mass(std::size_t i) const;
  double cum_c0_mass(std::size_t i) const;

  // Requires first() <= a < b <= last().
  Block Span(std::size_t a, std::size_t b) const {
    if (exact()) {
      const std::uint64_t count = cum_count_[b - first_] - cum_count_[a - first_];
      const std::uint64_t c0 =
          cum_c0_count_[b - first_] - cum_c0_count_[a - first_];
      return {static_cast<double>(count) / total_,
              static_cast<double>(c0) / static_cast<double>(count)};
    }
    const double mass = cum_mass_[b - first_] - cum_mass_[a - first_];
    const double c0 = cum_c0_mass_[b - first_] - cum_c0_mass_[a - first_];
    return {mass, Clamp01(c0 / mass)};
  }

 private:
  static double Clamp01(double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); }

  std::size_t first_ = 0;
  double total_ = 0.0;
  std::vector<std::uint64_t> cum_count_;
  std::vector<std::uint64_t> cum_c0_count_;
  std::vector<double> cum_mass_;
  std::vector<double> cum_c0_mass_;
};

// Incremental oracle for the marginal gain of adding a split point to a
// growing boundary set S. The index covers boundary positions lo..hi; lo and
// hi are always members of S and candidates are lo+1..hi-1. A full index has
// lo = 0 and hi = n. A shard of the distributed optimizer owns a sub-range.
//
// Gain queries and neighbor lookups are const and may run concurrently;
// Insert needs exclusive access.
class BoundaryIndex {
 public:
  // Full index over the feature. Throws ValidationError when n = 0.
  static BoundaryIndex Build(const SortedFeature& feature,
                             LogBase base = LogBase::kTwo);
  // Index over a sub-range; both ends become fixed members of S.
  static BoundaryIndex BuildRange(const SortedFeature& feature, std::size_t lo,
                                  std::size_t hi, LogBase base = LogBase::kTwo);

  BoundaryIndex(PrefixTables tables, MiContext ctx);

  std::size_t lo() const { return lo_; }
  std::size_t hi() const { return hi_; }
  const PrefixTables& tables() const { return tables_; }
  const MiContext& context() const { return ctx_; }

  // Delta_s F(S). Throws RangeError outside (lo, hi) and
  // DuplicateBoundaryError if s is already in S.
  double QueryGain(std::size_t s) const;
  // Adds s to S and returns the gain it contributed.
  double Insert(std::size_t s);
  // Predecessor and successor of s in S, excluding s itself.
  std::pair<std::size_t, std::size_t> Neighbors(std::size_t s) const;
  bool Contains(std::size_t s) const;

  // Gain of splitting the block (left, right] at s, with no membership checks.
  // Used by scans that already know the enclosing block.
  double BlockGain(std::size_t left, std::size_t s, std::size_t right) const;

  // F(S) restricted to this index's range (the full objective for lo = 0,
  // hi = n), maintained as the running sum of insertion gains.
  double objective() const { return objective_; }
  std::size_t num_interior() const { return set_.size() - 2; }
  // Interior members of S in ascending order.
  std::vector<std::size_t> Interior() const;
  // Interior members as a BoundarySet over n = hi (full indexes only).
  BoundarySet Boundaries() const;

 private:
  void CheckCandidate(std::size_t s) const;

  PrefixTables tables_;
  MiContext ctx_;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  // Offsets relative to lo_.
  BitTreeSet set_;
  double objective_ = 0.0;
};

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_BOUNDARY_INDEX_H_
