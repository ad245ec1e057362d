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

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "vocab_squeeze/boundary_index.h"
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

void BM_Build(benchmark::State& state) {
  const SortedFeature f = CountFeature(state.range(0), 1);
  for (auto _ : state) {
    BoundaryIndex index = BoundaryIndex::Build(f);
    benchmark::DoNotOptimize(index);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Build)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

void BM_QueryGain(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const SortedFeature f = CountFeature(n, 2);
  BoundaryIndex index = BoundaryIndex::Build(f);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(1, n - 1);
  for (std::size_t i = 0; i < n / 100; ++i) {
    const std::size_t s = pick(rng);
    if (!index.Contains(s)) index.Insert(s);
  }
  std::vector<std::size_t> probes;
  while (probes.size() < 4096) {
    const std::size_t s = pick(rng);
    if (!index.Contains(s)) probes.push_back(s);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.QueryGain(probes[i++ & 4095]));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_QueryGain)->RangeMultiplier(10)->Range(1000, 10000000)->Complexity();

void BM_Insert(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const SortedFeature f = CountFeature(n, 4);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t s = 1; s < n; ++s) order[s - 1] = s;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  order.resize(n / 10);
  for (auto _ : state) {
    state.PauseTiming();
    BoundaryIndex index = BoundaryIndex::Build(f);
    state.ResumeTiming();
    for (std::size_t s : order) benchmark::DoNotOptimize(index.Insert(s));
  }
  state.SetItemsProcessed(state.iterations() * order.size());
  state.SetComplexityN(n);
}
BENCHMARK(BM_Insert)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

}  // namespace
}  // namespace vocab_squeeze

BENCHMARK_MAIN();
