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

#include "vocab_squeeze/boundary_index.h"

#include <string>

#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {

PrefixTables PrefixTables::FromFeature(const SortedFeature& feature) {
  return FromFeatureRange(feature, 0, feature.size());
}

PrefixTables PrefixTables::FromFeatureRange(const SortedFeature& feature,
                                            std::size_t lo, std::size_t hi) {
  if (!(lo < hi && hi <= feature.size())) {
    throw RangeError("prefix range [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "] invalid for n = " +
                     std::to_string(feature.size()));
  }
  PrefixTables t;
  t.first_ = lo;
  const std::size_t entries = hi - lo + 1;
  if (feature.has_counts()) {
    t.total_ = static_cast<double>(feature.total_count);
    std::uint64_t count = 0;
    std::uint64_t c0 = 0;
    for (std::size_t i = 0; i < lo; ++i) {
      count += feature.count_c0[i] + feature.count_c1[i];
      c0 += feature.count_c0[i];
    }
    t.cum_count_.resize(entries);
    t.cum_c0_count_.resize(entries);
    t.cum_count_[0] = count;
    t.cum_c0_count_[0] = c0;
    for (std::size_t i = lo; i < hi; ++i) {
      count += feature.count_c0[i] + feature.count_c1[i];
      c0 += feature.count_c0[i];
      t.cum_count_[i - lo + 1] = count;
      t.cum_c0_count_[i - lo + 1] = c0;
    }
  } else {
    long double mass = 0.0L;
    long double c0 = 0.0L;
    for (std::size_t i = 0; i < lo; ++i) {
      mass += feature.p_x[i];
      c0 += static_cast<long double>(feature.p_x[i]) * feature.cond[i];
    }
    t.cum_mass_.resize(entries);
    t.cum_c0_mass_.resize(entries);
    t.cum_mass_[0] = static_cast<double>(mass);
    t.cum_c0_mass_[0] = static_cast<double>(c0);
    for (std::size_t i = lo; i < hi; ++i) {
      mass += feature.p_x[i];
      c0 += static_cast<long double>(feature.p_x[i]) * feature.cond[i];
      t.cum_mass_[i - lo + 1] = static_cast<double>(mass);
      t.cum_c0_mass_[i - lo + 1] = static_cast<double>(c0);
    }
  }
  return t;
}

std::size_t PrefixTables::num_entries() const {
  return exact() ? cum_count_.size() : cum_mass_.size();
}

double PrefixTables::cum_mass(std::size_t i) const {
  if (i < first_ || i > last()) {
    throw RangeError("prefix entry " + std::to_string(i) + " not held");
  }
  return exact() ? static_cast<double>(cum_count_[i - first_]) / total_
                 : cum_mass_[i - first_];
}

double PrefixTables::cum_c0_mass(std::size_t i) const {
  if (i < first_ || i > last()) {
    throw RangeError("prefix entry " + std::to_string(i) + " not held");
  }
  return exact() ? static_cast<double>(cum_c0_count_[i - first_]) / total_
                 : cum_c0_mass_[i - first_];
}

BoundaryIndex BoundaryIndex::Build(const SortedFeature& feature, LogBase base) {
  if (feature.size() == 0) throw ValidationError("cannot index an empty feature");
  return BoundaryIndex(PrefixTables::FromFeature(feature),
                       ContextFor(feature, base));
}

BoundaryIndex BoundaryIndex::BuildRange(const SortedFeature& feature,
                                        std::size_t lo, std::size_t hi,
                                        LogBase base) {
  return BoundaryIndex(PrefixTables::FromFeatureRange(feature, lo, hi),
                       ContextFor(feature, base));
}

BoundaryIndex::BoundaryIndex(PrefixTables tables, MiContext ctx)
    : tables_(std::move(tables)),
      ctx_(ctx),
      lo_(tables_.first()),
      hi_(tables_.last()),
      set_(hi_ - lo_ + 1) {
  set_.Insert(0);
  set_.Insert(hi_ - lo_);
}

void BoundaryIndex::CheckCandidate(std::size_t s) const {
  if (s <= lo_ || s >= hi_) {
    throw RangeError("candidate " + std::to_string(s) + " outside (" +
                     std::to_string(lo_) + ", " + std::to_string(hi_) + ")");
  }
  if (set_.Contains(s - lo_)) {
    throw DuplicateBoundaryError("boundary " + std::to_string(s) +
                                 " already selected");
  }
}

double BoundaryIndex::BlockGain(std::size_t left, std::size_t s,
                                std::size_t right) const {
  const PrefixTables::Block a = tables_.Span(left, s);
  const PrefixTables::Block b = tables_.Span(s, right);
  return MarginalGain(a.mass, b.mass, a.cond, b.cond, ctx_);
}

std::pair<std::size_t, std::size_t> BoundaryIndex::Neighbors(
    std::size_t s) const {
  if (s <= lo_ || s >= hi_) {
    throw RangeError("position " + std::to_string(s) + " outside (" +
                     std::to_string(lo_) + ", " + std::to_string(hi_) + ")");
  }
  // Both ends are always present, so neither lookup can fail.
  return {*set_.Predecessor(s - lo_) + lo_, *set_.Successor(s - lo_) + lo_};
}

double BoundaryIndex::QueryGain(std::size_t s) const {
  CheckCandidate(s);
  const auto [left, right] = Neighbors(s);
  return BlockGain(left, s, right);
}

double BoundaryIndex::Insert(std::size_t s) {
  const double gain = QueryGain(s);
  set_.Insert(s - lo_);
  objective_ += gain;
  return gain;
}

bool BoundaryIndex::Contains(std::size_t s) const {
  return s >= lo_ && s <= hi_ && set_.Contains(s - lo_);
}

std::vector<std::size_t> BoundaryIndex::Interior() const {
  std::vector<std::size_t> all = set_.Elements();
  std::vector<std::size_t> interior;
  interior.reserve(all.size() - 2);
  for (std::size_t i = 1; i + 1 < all.size(); ++i) interior.push_back(all[i] + lo_);
  return interior;
}

BoundarySet BoundaryIndex::Boundaries() const {
  if (lo_ != 0) throw RangeError("boundaries of a partial index");
  return BoundarySet(hi_, Interior());
}

}  // namespace vocab_squeeze
