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

#include "vocab_squeeze/greedy.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <string>

#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/parallel.h"
#include "vocab_squeeze/random.h"

namespace vocab_squeeze {
namespace {

// Gains within this relative distance are treated as equal.
constexpr double kRelativeTolerance = 1e-12;
// Below this many candidates a scan is not worth spreading over threads.
constexpr std::size_t kParallelGrain = 1 << 14;

// True if (gain, s) should replace (best_gain, best_s): a clearly larger gain,
// or an equal one at a smaller position.
bool Better(double gain, std::size_t s, double best_gain, std::size_t best_s) {
  const double tol =
      kRelativeTolerance * std::max(std::abs(gain), std::abs(best_gain));
  if (gain > best_gain + tol) return true;
  if (gain < best_gain - tol) return false;
  return s < best_s;
}

struct Plan {
  std::size_t n = 0;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

Plan Prepare(const BoundaryIndex& index, const GreedyConfig& config) {
  if (index.lo() != 0) {
    throw ValidationError("greedy needs an index over the whole feature");
  }
  if (index.num_interior() != 0) {
    throw ValidationError("greedy needs an index with no boundaries yet");
  }
  if (config.m == 0) throw ValidationError("target vocabulary size m = 0");
  Plan plan;
  plan.n = index.hi();
  std::size_t m = config.m;
  if (m > plan.n) {
    plan.warnings.push_back("m = " + std::to_string(m) + " exceeds n = " +
                            std::to_string(plan.n) +
                            "; using the identity mapping");
    m = plan.n;
  }
  plan.steps = m - 1;
  return plan;
}

GreedyResult Finish(const BoundaryIndex& index, std::vector<GreedyStep> steps,
                    std::vector<std::string> warnings,
                    std::chrono::steady_clock::time_point start) {
  GreedyResult result;
  result.boundaries = index.Boundaries();
  result.steps = std::move(steps);
  result.objective = index.objective();
  result.warnings = std::move(warnings);
  result.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

struct Candidate {
  double gain;
  std::size_t s;
  std::size_t left;
  std::size_t right;
};

// Max-heap order: larger gain first, then smaller position.
struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.s > b.s;
  }
};

}  // namespace

std::size_t StochasticSampleSize(std::size_t n, std::size_t m, double epsilon) {
  if (m == 0) throw ValidationError("m = 0");
  const double size = std::ceil(static_cast<double>(n) /
                                static_cast<double>(m) * std::log(1.0 / epsilon));
  return std::max<std::size_t>(1, static_cast<std::size_t>(size));
}

GreedyResult StochasticGreedy(BoundaryIndex& index, const GreedyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(config.epsilon > 0.0 && config.epsilon <= 0.5)) {
    throw ValidationError("epsilon must lie in (0, 0.5]");
  }
  Plan plan = Prepare(index, config);
  const std::size_t n = plan.n;
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("vocabulary too large");
  }
  const std::size_t sample_size =
      StochasticSampleSize(n, plan.steps + 1, config.epsilon);

  // Unselected candidates. The first `t` slots hold the current sample after
  // a partial Fisher-Yates shuffle.
  std::vector<std::uint32_t> pool(n - 1);
  for (std::size_t s = 1; s < n; ++s) pool[s - 1] = static_cast<std::uint32_t>(s);
  std::vector<double> gains(std::min(sample_size, pool.size()));
  std::mt19937_64 rng(DeriveSeed(config.seed, 0));

  std::vector<GreedyStep> steps;
  steps.reserve(plan.steps);
  for (std::size_t step = 0; step < plan.steps; ++step) {
    const std::size_t remaining = pool.size();
    const std::size_t t = std::min(sample_size, remaining);
    for (std::size_t j = 0; j < t; ++j) {
      const std::size_t r = j + UniformIndex(rng, remaining - j);
      std::swap(pool[j], pool[r]);
    }
    auto evaluate = [&](std::size_t j) { gains[j] = index.QueryGain(pool[j]); };
    if (config.num_threads > 1 && t >= kParallelGrain) {
      ParallelFor(0, t, config.num_threads, evaluate);
    } else {
      for (std::size_t j = 0; j < t; ++j) evaluate(j);
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < t; ++j) {
      if (Better(gains[j], pool[j], gains[best], pool[best])) best = j;
    }
    const std::size_t chosen = pool[best];
    steps.push_back({chosen, index.Insert(chosen)});
    pool[best] = pool.back();
    pool.pop_back();
  }
  return Finish(index, std::move(steps), std::move(plan.warnings), start);
}

GreedyResult ClassicGreedy(BoundaryIndex& index, const GreedyConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Plan plan = Prepare(index, config);

  // A candidate's gain depends only on the block of S that encloses it, so
  // the best candidate of every block is kept in a heap and only the two
  // halves of a split block are rescanned. Selection is identical to
  // rescanning every candidate at every step.
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
  std::vector<double> buffer;
  auto scan_block = [&](std::size_t left, std::size_t right) {
    if (right - left < 2) return;
    const std::size_t count = right - left - 1;
    Candidate best{-1.0, 0, left, right};
    if (config.num_threads > 1 && count >= kParallelGrain) {
      buffer.resize(count);
      ParallelFor(0, count, config.num_threads, [&](std::size_t j) {
        buffer[j] = index.BlockGain(left, left + 1 + j, right);
      });
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t s = left + 1 + j;
        if (best.gain < 0.0 || Better(buffer[j], s, best.gain, best.s)) {
          best.gain = buffer[j];
          best.s = s;
        }
      }
    } else {
      for (std::size_t s = left + 1; s < right; ++s) {
        const double gain = index.BlockGain(left, s, right);
        if (best.gain < 0.0 || Better(gain, s, best.gain, best.s)) {
          best.gain = gain;
          best.s = s;
        }
      }
    }
    heap.push(best);
  };

  scan_block(0, plan.n);
  std::vector<GreedyStep> steps;
  steps.reserve(plan.steps);
  for (std::size_t step = 0; step < plan.steps && !heap.empty(); ++step) {
    const Candidate top = heap.top();
    heap.pop();
    steps.push_back({top.s, index.Insert(top.s)});
    scan_block(top.left, top.s);
    scan_block(top.s, top.right);
  }
  return Finish(index, std::move(steps), std::move(plan.warnings), start);
}

GreedyResult RunGreedy(BoundaryIndex& index, const GreedyConfig& config) {
  return config.mode == GreedyMode::kClassic ? ClassicGreedy(index, config)
                                             : StochasticGreedy(index, config);
}

std::vector<GreedyStep> MarginalRanking(BoundaryIndex& index,
                                        std::size_t limit) {
  if (limit == 0) return {};
  GreedyConfig config;
  config.mode = GreedyMode::kClassic;
  config.m = std::min(limit, index.hi() - 1) + 1;
  return ClassicGreedy(index, config).steps;
}

}  // namespace vocab_squeeze
