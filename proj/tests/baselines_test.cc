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

#include "vocab_squeeze/baselines.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

SortedFeature TwoPointInstance() {
  return SortedFeature::FromProbabilities(
      std::vector<double>{0.5, 0.5}, std::vector<double>{1.0 / 3, 5.0 / 12});
}

// Two frequent label-independent values and four rare deterministic ones.
SortedFeature FrequentButUninformative() {
  return SortedFeature::FromCounts("x", {"a", "b", "c", "d", "e", "f"},
                                   std::vector<std::uint64_t>{2, 2, 0, 0, 1, 1},
                                   std::vector<std::uint64_t>{2, 2, 1, 1, 0, 0});
}

TEST(BucketingTest, NarrowBandCollapsesToOneBucket) {
  const SortedFeature f = TwoPointInstance();
  const BucketingResult r = Bucketing(f, 4);
  EXPECT_EQ(r.map.cluster(0), 1u);
  EXPECT_EQ(r.map.cluster(1), 1u);
  EXPECT_EQ(r.nonempty, 1u);
  EXPECT_EQ(PartitionMi(f, r.map), 0.0);
  EXPECT_GT(MutualInformation(f), 0.0);
}

TEST(BucketingTest, SpreadValuesAreKeptApart) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>{0.2, 0.3, 0.5}, std::vector<double>{0.05, 0.5, 0.95});
  const BucketingResult r = Bucketing(f, 8);
  EXPECT_EQ(r.nonempty, 3u);
  EXPECT_NEAR(PartitionMi(f, r.map), MutualInformation(f), 1e-15);
}

TEST(BucketingTest, ConditionalOneGoesToLastBucket) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 1.0});
  const BucketingResult r = Bucketing(f, 3);
  EXPECT_EQ(r.map.cluster(0), 0u);
  EXPECT_EQ(r.map.cluster(1), 2u);
  EXPECT_EQ(r.map.num_clusters(), 3u);
}

TEST(BucketingTest, ExactBucketsForCounts) {
  // 3/10 * 10 must land in bucket 3, 7/10 * 10 in bucket 7.
  const SortedFeature f =
      SortedFeature::FromCounts("x", {"a", "b"}, std::vector<std::uint64_t>{3, 7},
                                std::vector<std::uint64_t>{7, 3});
  const BucketingResult r = Bucketing(f, 10);
  EXPECT_EQ(r.map.cluster(0), 3u);
  EXPECT_EQ(r.map.cluster(1), 7u);
}

TEST(BucketingTest, MapIsConsecutive) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const SortedFeature f = testing::RandomFeature(rng, 1 + trial);
    EXPECT_TRUE(Bucketing(f, 1 + trial % 9).map.IsConsecutive());
  }
}

TEST(BucketingTest, LossWithinBound) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const SortedFeature f = trial % 2 ? testing::RandomFeature(rng, 5 + trial)
                                      : testing::RandomCountFeature(rng, 5 + trial);
    if (f.p0 <= 0.0 || f.p0 >= 1.0) continue;
    for (std::size_t k : {2u, 4u, 8u, 16u}) {
      const BucketingResult r = Bucketing(f, k);
      EXPECT_LE(MutualInformation(f) - PartitionMi(f, r.map),
                r.delta_max + 1e-12);
    }
  }
}

TEST(BucketingTest, ZeroBucketsRejected) {
  EXPECT_THROW(Bucketing(testing::FourValueInstance(), 0), ValidationError);
}

TEST(BucketingLossBoundTest, SingleBucketSpansWholeRange) {
  const MiContext ctx(0.3);
  EXPECT_NEAR(BucketingLossBound(1, ctx),
              std::max(ctx.Kernel(0.0), ctx.Kernel(1.0)), 1e-15);
}

TEST(BucketingLossBoundTest, HalfPriorTwoBuckets) {
  EXPECT_NEAR(BucketingLossBound(2, MiContext(0.5)), 1.0, 1e-15);
}

TEST(BucketingLossBoundTest, MatchesGridSearch) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(0.02, 0.98);
  for (int trial = 0; trial < 20; ++trial) {
    const MiContext ctx(unit(rng));
    for (std::size_t k : {1u, 2u, 3u, 5u, 8u}) {
      double worst = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        double lo = 1e300;
        double hi = -1e300;
        for (int g = 0; g <= 4000; ++g) {
          const double t = (static_cast<double>(j) + g / 4000.0) / k;
          const double v = ctx.Kernel(std::min(t, 1.0));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
      }
      const double bound = BucketingLossBound(k, ctx);
      EXPECT_GE(bound, worst - 1e-12);
      EXPECT_NEAR(bound, worst, 1e-3);
    }
  }
}

TEST(BucketingLossBoundTest, RefinementShrinksBound) {
  for (double p0 : {0.1, 0.37, 0.5, 0.8}) {
    const MiContext ctx(p0);
    for (std::size_t k = 1; k <= 64; k *= 2) {
      EXPECT_LE(BucketingLossBound(2 * k, ctx), BucketingLossBound(k, ctx) + 1e-15);
    }
  }
}

TEST(BucketingLossBoundTest, DegenerateRejected) {
  EXPECT_THROW(BucketingLossBound(2, MiContext(1.0)), DomainError);
}

TEST(FrequencyFilterTest, FrequentValuesCarryNoInformation) {
  const SortedFeature f = FrequentButUninformative();
  EXPECT_NEAR(MutualInformation(f), 1.0 / 3.0, 1e-12);
  const FrequencyResult r = FrequencyFilter(f, 2);
  EXPECT_EQ(r.retained, 2u);
  EXPECT_EQ(r.threshold, 4u);
  EXPECT_EQ(PartitionMi(f, r.map), 0.0);
  ASSERT_TRUE(r.map.oov_cluster().has_value());
  EXPECT_EQ(*r.map.oov_cluster(), 2u);
}

TEST(FrequencyFilterTest, BudgetCoversEverything) {
  const SortedFeature f = FrequentButUninformative();
  const FrequencyResult r = FrequencyFilter(f, 6);
  EXPECT_FALSE(r.map.oov_cluster().has_value());
  EXPECT_NEAR(PartitionMi(f, r.map), MutualInformation(f), 1e-15);
  EXPECT_EQ(r.threshold, 1u);
}

TEST(FrequencyFilterTest, ZeroBudgetIsAllOov) {
  const FrequencyResult r = FrequencyFilter(FrequentButUninformative(), 0);
  EXPECT_EQ(r.retained, 0u);
  EXPECT_EQ(r.threshold, 0u);
  EXPECT_EQ(PartitionMi(FrequentButUninformative(), r.map), 0.0);
}

TEST(FrequencyFilterTest, TiesByValueId) {
  const SortedFeature f = SortedFeature::FromCounts(
      "x", {"d", "c", "b", "a"}, std::vector<std::uint64_t>{1, 2, 1, 3},
      std::vector<std::uint64_t>{3, 2, 3, 1});
  const FrequencyResult r = FrequencyFilter(f, 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const bool kept = r.map.cluster(i) != *r.map.oov_cluster();
    EXPECT_EQ(kept, f.value_ids[i] == "a" || f.value_ids[i] == "b")
        << f.value_ids[i];
  }
}

TEST(GlobalFrequencyFilterTest, SingleThresholdAcrossFeatures) {
  std::vector<SortedFeature> features;
  features.push_back(SortedFeature::FromCounts(
      "a", {"x", "y"}, std::vector<std::uint64_t>{10, 1},
      std::vector<std::uint64_t>{0, 1}));
  features.push_back(SortedFeature::FromCounts(
      "b", {"x", "y", "z"}, std::vector<std::uint64_t>{5, 4, 1},
      std::vector<std::uint64_t>{0, 4, 0}));
  const auto results = GlobalFrequencyFilter(features, 3);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].retained, 1u);
  EXPECT_EQ(results[1].retained, 2u);
  EXPECT_EQ(results[0].threshold, 5u);
  EXPECT_EQ(results[1].threshold, 5u);
}

TEST(DivisiveTest, FourValueInstance) {
  const SortedFeature f = testing::FourValueInstance();
  const DivisiveResult r = DivisiveCluster(f, 2);
  EXPECT_EQ(r.map.cluster(0), r.map.cluster(1));
  EXPECT_EQ(r.map.cluster(2), r.map.cluster(3));
  EXPECT_NE(r.map.cluster(0), r.map.cluster(2));
  EXPECT_NEAR(PartitionMi(f, r.map), 0.3901596952835997, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(DivisiveTest, IdentityIsFixedPoint) {
  std::mt19937_64 rng(54);
  const SortedFeature f = testing::RandomFeature(rng, 12);
  const DivisiveResult r = DivisiveCluster(f, 12);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.map.num_nonempty(), 12u);
  EXPECT_NEAR(PartitionMi(f, r.map), MutualInformation(f), 1e-12);
}

TEST(DivisiveTest, EqualConditionalsConvergeAtOnce) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<double>(4, 0.6));
  const DivisiveResult r = DivisiveCluster(f, 2);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(PartitionMi(f, r.map), 0.0, 1e-15);
}

TEST(DivisiveTest, ObjectiveNonDecreasing) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    const SortedFeature f = trial % 2 ? testing::RandomFeature(rng, 10 + trial * 5)
                                      : testing::RandomCountFeature(rng, 10 + trial * 5);
    const DivisiveResult r = DivisiveCluster(f, 2 + trial % 7);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      EXPECT_GE(r.objective_history[i], r.objective_history[i - 1] - 1e-12);
    }
    EXPECT_NEAR(r.objective_history.back(), PartitionMi(f, r.map), 1e-12);
    EXPECT_EQ(r.map.num_nonempty(), std::min<std::size_t>(2 + trial % 7, f.size()));
  }
}

TEST(DivisiveTest, Errors) {
  EXPECT_THROW(DivisiveCluster(testing::FourValueInstance(), 0), ValidationError);
}

TEST(DpOptimalTest, TrivialBudgets) {
  const SortedFeature f = testing::FourValueInstance();
  EXPECT_TRUE(DpOptimal(f, 1).empty());
  EXPECT_EQ(DpOptimal(f, 4), BoundarySet::All(4));
  EXPECT_EQ(DpOptimal(f, 2), BoundarySet(4, {2}));
}

TEST(DpOptimalTest, AgreesWithEnumeration) {
  for (const auto& inst : testing::SmallSuite(100, 56)) {
    const double dp = EvaluatePartition(inst.feature, DpOptimal(inst.feature, inst.m));
    EXPECT_NEAR(dp, testing::EnumerateOptimum(inst.feature, inst.m).value, 1e-10);
  }
}

TEST(DpOptimalTest, NonDecreasingInBudget) {
  std::mt19937_64 rng(57);
  const SortedFeature f = testing::RandomCountFeature(rng, 40);
  double previous = 0.0;
  for (std::size_t m = 1; m <= 40; ++m) {
    const double v = EvaluatePartition(f, DpOptimal(f, m));
    EXPECT_GE(v, previous - 1e-12);
    previous = v;
  }
  EXPECT_NEAR(previous, MutualInformation(f), 1e-12);
}

TEST(DpOptimalTest, SizeGuard) {
  const SortedFeature big = SortedFeature::FromProbabilities(
      std::vector<double>(5001, 1.0), std::vector<double>(5001, 0.5));
  EXPECT_THROW(DpOptimal(big, 3), ValidationError);
}

TEST(DpOptimalTest, DominatesHeuristics) {
  std::mt19937_64 rng(58);
  for (int trial = 0; trial < 40; ++trial) {
    const SortedFeature f = testing::RandomCountFeature(rng, 8 + trial);
    for (std::size_t m : {2u, 3u, 5u}) {
      const double best = EvaluatePartition(f, DpOptimal(f, m));
      EXPECT_LE(PartitionMi(f, DivisiveCluster(f, m).map), best + 1e-12);
      EXPECT_LE(PartitionMi(f, Bucketing(f, m).map), best + 1e-12);
      EXPECT_LE(PartitionMi(f, FrequencyFilter(f, m - 1).map), best + 1e-12);
    }
  }
}

TEST(BruteForceTest, FourValueInstance) {
  const SortedFeature f = testing::FourValueInstance();
  const BoundarySet s = BruteForceOptimal(f, 2);
  EXPECT_EQ(s, BoundarySet(4, {2}));
  EXPECT_NEAR(EvaluatePartition(f, s), 0.3901596952835997, 1e-12);
}

TEST(BruteForceTest, DeterministicPair) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(EvaluatePartition(f, BruteForceOptimal(f, 2)), 1.0, 1e-15);
}

TEST(BruteForceTest, SingleClusterIsZero) {
  std::mt19937_64 rng(59);
  const SortedFeature f = testing::RandomFeature(rng, 9);
  EXPECT_TRUE(BruteForceOptimal(f, 1).empty());
}

TEST(BruteForceTest, TiesGoToLexicographicallySmallest) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>(6, 1.0), std::vector<double>(6, 0.5));
  EXPECT_EQ(BruteForceOptimal(f, 3), BoundarySet(6, {1, 2}));
}

TEST(BruteForceTest, RequiredBoundaries) {
  std::mt19937_64 rng(60);
  for (int trial = 0; trial < 50; ++trial) {
    const SortedFeature f = testing::RandomFeature(rng, 8 + trial % 5);
    const std::vector<std::size_t> required = {4};
    const BoundarySet s = BruteForceOptimal(f, 4, required);
    EXPECT_TRUE(s.contains(4));
    EXPECT_NEAR(EvaluatePartition(f, s),
                testing::EnumerateOptimum(f, 4, required).value, 1e-12);
  }
}

TEST(BruteForceTest, Guard) {
  const SortedFeature f = SortedFeature::FromProbabilities(
      std::vector<double>(60, 1.0), std::vector<double>(60, 0.5));
  EXPECT_THROW(BruteForceOptimal(f, 10), ValidationError);
}

}  // namespace
}  // namespace vocab_squeeze
