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

#include "vocab_squeeze/bit_tree_set.h"

#include <algorithm>
#include <bit>

namespace vocab_squeeze {

BitTreeSet::BitTreeSet(std::size_t universe) : universe_(universe) {
  std::size_t words = (universe + 63) / 64;
  do {
    words = std::max<std::size_t>(words, 1);
    levels_.emplace_back(words, 0);
    words = (words + 63) / 64;
  } while (levels_.back().size() > 1);
}

bool BitTreeSet::Insert(std::size_t x) {
  if (Contains(x)) return false;
  for (auto& level : levels_) {
    const std::size_t w = x >> 6;
    const bool was_empty = level[w] == 0;
    level[w] |= std::uint64_t{1} << (x & 63);
    if (!was_empty) break;
    x = w;
  }
  ++size_;
  return true;
}

bool BitTreeSet::Contains(std::size_t x) const {
  if (x >= universe_) return false;
  return (levels_[0][x >> 6] >> (x & 63)) & 1;
}

std::optional<std::size_t> BitTreeSet::Successor(std::size_t x) const {
  if (x >= universe_) return std::nullopt;
  std::size_t pos = x;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const std::size_t w = pos >> 6;
    const unsigned b = pos & 63;
    const std::uint64_t above =
        b == 63 ? 0 : levels_[l][w] & (~std::uint64_t{0} << (b + 1));
    if (above != 0) {
      pos = (w << 6) + static_cast<std::size_t>(std::countr_zero(above));
      for (std::size_t d = l; d > 0; --d) {
        pos = (pos << 6) +
              static_cast<std::size_t>(std::countr_zero(levels_[d - 1][pos]));
      }
      return pos;
    }
    pos = w;
  }
  return std::nullopt;
}

std::optional<std::size_t> BitTreeSet::Predecessor(std::size_t x) const {
  if (universe_ == 0 || x == 0) return std::nullopt;
  if (x >= universe_) {
    if (Contains(universe_ - 1)) return universe_ - 1;
    x = universe_ - 1;
  }
  std::size_t pos = x;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const std::size_t w = pos >> 6;
    const unsigned b = pos & 63;
    const std::uint64_t below = levels_[l][w] & ((std::uint64_t{1} << b) - 1);
    if (below != 0) {
      pos = (w << 6) + 63 - static_cast<std::size_t>(std::countl_zero(below));
      for (std::size_t d = l; d > 0; --d) {
        pos = (pos << 6) + 63 -
              static_cast<std::size_t>(std::countl_zero(levels_[d - 1][pos]));
      }
      return pos;
    }
    pos = w;
  }
  return std::nullopt;
}

std::vector<std::size_t> BitTreeSet::Elements() const {
  std::vector<std::size_t> out;
  out.reserve(size_);
  const auto& leaves = levels_[0];
  for (std::size_t w = 0; w < leaves.size(); ++w) {
    for (std::uint64_t bits = leaves[w]; bits != 0; bits &= bits - 1) {
      out.push_back((w << 6) + static_cast<std::size_t>(std::countr_zero(bits)));
    }
  }
  return out;
}

}  // namespace vocab_squeeze
