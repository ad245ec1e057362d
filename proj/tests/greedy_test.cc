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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "test_util.h"
#include "vocab_squeeze/baselines.h"
#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

GreedyResult Greedy(const SortedFeature& f, std::size_t m, GreedyMode mode,
                 std::uint64_t seed = 0, double epsilon = 0.05,
                 int threads = 1) {
  BoundaryIndex index = BoundaryIndex::Build(f);
  GreedyConfig config;
  config.m = m;
  config.mode = mode;
  config.seed = seed;
  config.epsilon = epsilon;
  config.num_threads = threads;
  return RunGreedy(index, config);
}

double GainSum(const GreedyResult& r) {
  double total = 0.0;
  for (const auto& step : r.steps) total += step.gain;
  return total;
}

TEST(SampleSizeTest, Formula) {
  EXPECT_EQ(StochasticSampleSize(1000, 10, 0.05),
            static_cast<std::size_t>(std::ceil(100 * std::log(20.0))));
  EXPECT_EQ(StochasticSampleSize(4, 2, 0.01),
            static_cast<std::size_t>(std::ceil(2 * std::log(100.0))));
  EXPECT_GE(StochasticSampleSize(10, 10, 0.5), 1u);
}

TEST(StochasticGreedyTest, FullBudgetSelectsEverything) {
  std::mt19937_64 rng(21);
  const SortedFeature f = testing::RandomFeature(rng, 12);
  const GreedyResult r = Greedy(f, 12, GreedyMode::kStochastic, 3);
  EXPECT_EQ(r.boundaries, BoundarySet::All(12));
  EXPECT_NEAR(r.objective, MutualInformation(f), 1e-9);
}

TEST(StochasticGreedyTest, FourValueInstancePicksMiddle) {
  const SortedFeature f = testing::FourValueInstance();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GreedyResult r = Greedy(f, 2, GreedyMode::kStochastic, seed, 0.01);
    EXPECT_EQ(r.boundaries, BoundarySet(4, {2}));
    EXPECT_NEAR(r.objective, 0.3901596952835997, 1e-12);
  }
}

TEST(StochasticGreedyTest, OversizedTargetClampsWithWarning) {
  const SortedFeature f = testing::FourValueInstance();
  const GreedyResult r = Greedy(f, 9, GreedyMode::kStochastic);
  EXPECT_EQ(r.boundaries, BoundarySet::All(4));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(StochasticGreedyTest, InvalidConfig) {
  const SortedFeature f = testing::FourValueInstance();
  EXPECT_THROW(Greedy(f, 2, GreedyMode::kStochastic, 0, 0.0), ValidationError);
  EXPECT_THROW(Greedy(f, 2, GreedyMode::kStochastic, 0, 0.6), ValidationError);
  EXPECT_THROW(Greedy(f, 0, GreedyMode::kStochastic), ValidationError);
  BoundaryIndex used = BoundaryIndex::Build(f);
  used.Insert(1);
  GreedyConfig config;
  EXPECT_THROW(StochasticGreedy(used, config), ValidationError);
}

TEST(StochasticGreedyTest, SameSeedSameResult) {
  std::mt19937_64 rng(22);
  const SortedFeature f = testing::RandomCountFeature(rng, 3000);
  const GreedyResult a = Greedy(f, 60, GreedyMode::kStochastic, 99);
  const GreedyResult b = Greedy(f, 60, GreedyMode::kStochastic, 99);
  EXPECT_EQ(a.boundaries, b.boundaries);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].boundary, b.steps[i].boundary);
    EXPECT_EQ(a.steps[i].gain, b.steps[i].gain);
  }
  EXPECT_EQ(a.objective, b.objective);
}

TEST(StochasticGreedyTest, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(23);
  const SortedFeature f = testing::RandomCountFeature(rng, 20000);
  const GreedyResult one = Greedy(f, 50, GreedyMode::kStochastic, 5, 0.05, 1);
  const GreedyResult four = Greedy(f, 50, GreedyMode::kStochastic, 5, 0.05, 4);
  EXPECT_EQ(one.boundaries, four.boundaries);
  EXPECT_EQ(one.objective, four.objective);
}

TEST(StochasticGreedyTest, GainAccountingAndSize) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial * 13;
    const SortedFeature f = testing::RandomFeature(rng, n);
    const std::size_t m = 2 + trial % 9;
    const GreedyResult r = Greedy(f, m, GreedyMode::kStochastic, trial);
    EXPECT_EQ(r.boundaries.size(), std::min(m - 1, n - 1));
    EXPECT_NEAR(GainSum(r), r.objective, 1e-9);
    EXPECT_NEAR(r.objective, EvaluatePartition(f, r.boundaries), 1e-9);
    for (const auto& step : r.steps) EXPECT_GE(step.gain, 0.0);
  }
}

TEST(StochasticGreedyTest, ApproximationOnSmallInstances) {
  const double floor_ratio = 1.0 - 1.0 / std::exp(1.0) - 0.05;
  for (const auto& inst : testing::SmallSuite(200, 31)) {
    const double best =
        EvaluatePartition(inst.feature, BruteForceOptimal(inst.feature, inst.m));
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      mean += Greedy(inst.feature, inst.m, GreedyMode::kStochastic, seed).objective;
    }
    EXPECT_GE(mean / 10, floor_ratio * best - 1e-12);
  }
}

TEST(ClassicGreedyTest, FourValueInstancePicksMiddle) {
  const GreedyResult r = Greedy(testing::FourValueInstance(), 2, GreedyMode::kClassic);
  EXPECT_EQ(r.boundaries, BoundarySet(4, {2}));
}

TEST(ClassicGreedyTest, ConstantConditionalsReturnFirstIndices) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>(8, 1.0), std::vector<double>(8, 0.3));
  const GreedyResult r = Greedy(f, 4, GreedyMode::kClassic);
  EXPECT_EQ(r.boundaries, BoundarySet(8, {1, 2, 3}));
  EXPECT_EQ(r.objective, 0.0);
}

TEST(ClassicGreedyTest, FirstStepIsBestSingleSplit) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 40;
    const SortedFeature f = testing::RandomFeature(rng, n);
    double best = 0.0;
    for (std::size_t s = 1; s < n; ++s) {
      best = std::max(best, EvaluatePartition(f, BoundarySet(n, {s})));
    }
    const GreedyResult r = Greedy(f, 2, GreedyMode::kClassic);
    EXPECT_NEAR(r.objective, best, 1e-12);
  }
}

TEST(ClassicGreedyTest, MatchesNaiveGreedy) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + trial * 3;
    const SortedFeature f = testing::RandomCountFeature(rng, n);
    const std::size_t m = 2 + trial % 10;
    const GreedyResult r = Greedy(f, m, GreedyMode::kClassic);
    // Naive greedy with from-scratch evaluations.
    std::vector<std::size_t> chosen;
    double current = 0.0;
    for (std::size_t step = 0; step + 1 < std::min(m, n); ++step) {
      double best_gain = -1.0;
      std::size_t best_s = 0;
      for (std::size_t s = 1; s < n; ++s) {
        if (std::find(chosen.begin(), chosen.end(), s) != chosen.end()) continue;
        std::vector<std::size_t> next = chosen;
        next.push_back(s);
        const double gain = EvaluatePartition(f, BoundarySet(n, next)) - current;
        if (gain > best_gain) {
          best_gain = gain;
          best_s = s;
        }
      }
      chosen.push_back(best_s);
      current += best_gain;
    }
    EXPECT_NEAR(r.objective, current, 1e-9);
  }
}

TEST(ClassicGreedyTest, ApproximationOnSmallInstances) {
  const double ratio = 1.0 - 1.0 / std::exp(1.0);
  for (const auto& inst : testing::SmallSuite(200, 32)) {
    const double best = testing::EnumerateOptimum(inst.feature, inst.m).value;
    EXPECT_GE(Greedy(inst.feature, inst.m, GreedyMode::kClassic).objective,
              ratio * best - 1e-12);
  }
}

TEST(MarginalRankingTest, FullRankingSumsToMutualInformation) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial * 4;
    const SortedFeature f = testing::RandomCountFeature(rng, n);
    BoundaryIndex index = BoundaryIndex::Build(f);
    const std::vector<GreedyStep> ranking = MarginalRanking(index, n - 1);
    ASSERT_EQ(ranking.size(), n - 1);
    double total = 0.0;
    for (const auto& step : ranking) total += step.gain;
    EXPECT_NEAR(total, MutualInformation(f), 1e-9);
  }
}

TEST(MarginalRankingTest, GainsNonIncreasing) {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 100; ++trial) {
    const SortedFeature f = testing::RandomFeature(rng, 2 + trial % 60);
    BoundaryIndex index = BoundaryIndex::Build(f);
    const std::vector<GreedyStep> ranking = MarginalRanking(index, f.size());
    for (std::size_t i = 1; i < ranking.size(); ++i) {
      EXPECT_LE(ranking[i].gain, ranking[i - 1].gain + 1e-12);
    }
  }
}

TEST(MarginalRankingTest, LimitOneIsBestSplit) {
  BoundaryIndex index = BoundaryIndex::Build(testing::FourValueInstance());
  const std::vector<GreedyStep> ranking = MarginalRanking(index, 1);
  ASSERT_EQ(ranking.size(), 1u);
  EXPECT_EQ(ranking[0].boundary, 2u);
  EXPECT_NEAR(ranking[0].gain, 0.3901596952835997, 1e-12);
}

}  // namespace
}  // namespace vocab_squeeze
