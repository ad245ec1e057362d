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

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/distributed.h"
#include "vocab_squeeze/greedy.h"
#include "vocab_squeeze/ingest.h"

namespace vocab_squeeze {
namespace {

SortedFeature CountFeature(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> count(0, 100);
  std::vector<std::uint64_t> c0(n);
  std::vector<std::uint64_t> c1(n);
  for (std::size_t i = 0; i < n; ++i) {
    do {
      c0[i] = count(rng);
      c1[i] = count(rng);
    } while (c0[i] + c1[i] == 0);
  }
  return SortedFeature::FromCounts("bench", {}, c0, c1);
}

void RunMode(benchmark::State& state, GreedyMode mode) {
  const std::size_t n = state.range(0);
  const SortedFeature f = CountFeature(n, 1);
  GreedyConfig config;
  config.m = n / 100;
  config.mode = mode;
  for (auto _ : state) {
    BoundaryIndex index = BoundaryIndex::Build(f);
    benchmark::DoNotOptimize(RunGreedy(index, config).objective);
  }
  state.SetComplexityN(n);
}

void BM_StochasticGreedy(benchmark::State& state) {
  RunMode(state, GreedyMode::kStochastic);
}
BENCHMARK(BM_StochasticGreedy)
    ->RangeMultiplier(10)
    ->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_ClassicGreedy(benchmark::State& state) {
  RunMode(state, GreedyMode::kClassic);
}
BENCHMARK(BM_ClassicGreedy)
    ->RangeMultiplier(10)
    ->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_ThresholdRounds(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const SortedFeature f = CountFeature(n, 2);
  const ShardPlan plan = PlanShards(n, n / 100, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunThresholdRounds(plan, f).result.objective);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ThresholdRounds)
    ->RangeMultiplier(10)
    ->Range(1000, 100000)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

}  // namespace
}  // namespace vocab_squeeze

BENCHMARK_MAIN();
