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

#ifndef VOCAB_SQUEEZE_GREEDY_H_
#define VOCAB_SQUEEZE_GREEDY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze {

enum class GreedyMode { kStochastic, kClassic };

struct GreedyConfig {
  // Target vocabulary size; m - 1 boundaries are selected.
  std::size_t m = 2;
  // Stochastic mode only. Must lie in (0, 0.5].
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  GreedyMode mode = GreedyMode::kStochastic;
  // Workers for the per-step candidate scan. Results do not depend on it.
  int num_threads = 1;
};

struct GreedyStep {
  std::size_t boundary = 0;
  double gain = 0.0;
};

struct GreedyResult {
  BoundarySet boundaries;
  // Insertions in order, with the gain each contributed when inserted.
  std::vector<GreedyStep> steps;
  double objective = 0.0;
  double elapsed_ms = 0.0;
  std::vector<std::string> warnings;
};

// Candidates sampled per step: ceil((n / m) ln(1 / epsilon)), at least one.
std::size_t StochasticSampleSize(std::size_t n, std::size_t m, double epsilon);

// Stochastic greedy: each of the m-1 steps samples StochasticSampleSize
// candidates uniformly without replacement from the unselected positions and
// inserts the best one (ties to the smallest position). Expected value is
// within 1 - 1/e - epsilon of the optimum.
//
// `index` must be a full index with an empty interior. m > n is clamped to
// n with a warning.
GreedyResult StochasticGreedy(BoundaryIndex& index, const GreedyConfig& config);

// Deterministic greedy: each step inserts the candidate with the largest
// gain over all unselected positions (ties to the smallest position).
GreedyResult ClassicGreedy(BoundaryIndex& index, const GreedyConfig& config);

// Dispatches on config.mode.
GreedyResult RunGreedy(BoundaryIndex& index, const GreedyConfig& config);

// First `limit` steps of classic greedy with their insertion gains. Gains are
// non-increasing; with limit = n - 1 they sum to I(X;C).
std::vector<GreedyStep> MarginalRanking(BoundaryIndex& index,
                                        std::size_t limit);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_GREEDY_H_
