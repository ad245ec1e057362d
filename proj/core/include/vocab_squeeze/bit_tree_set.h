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

#ifndef VOCAB_SQUEEZE_BIT_TREE_SET_H_
#define VOCAB_SQUEEZE_BIT_TREE_SET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace vocab_squeeze {

// Ordered set of integers in [0, universe) backed by a 64-ary tree of
// bitmaps. Insert, membership, predecessor and successor all run in
// O(log_64 universe) word operations; memory is about universe / 8 bytes.
class BitTreeSet {
 public:
  BitTreeSet() = default;
  explicit BitTreeSet(std::size_t universe);

  std::size_t universe() const { return universe_; }
  std::size_t size() const { return size_; }

  // Returns false if x was already present.
  bool Insert(std::size_t x);
  bool Contains(std::size_t x) const;
  // Largest element strictly less than x.
  std::optional<std::size_t> Predecessor(std::size_t x) const;
  // Smallest element strictly greater than x.
  std::optional<std::size_t> Successor(std::size_t x) const;

  // Elements in ascending order.
  std::vector<std::size_t> Elements() const;

 private:
  // levels_[0] holds one bit per element; bit j of word w at level l+1 is set
  // when word 64*w+j at level l is non-zero.
  std::vector<std::vector<std::uint64_t>> levels_;
  std::size_t universe_ = 0;
  std::size_t size_ = 0;
};

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_BIT_TREE_SET_H_
