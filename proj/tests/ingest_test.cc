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

#include "vocab_squeeze/ingest.h"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_util.h"
#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

FeatureTable Parse(const std::string& text, const IngestOptions& options = {}) {
  std::istringstream in(text);
  return ParseCounts(in, options);
}

TEST(ParseCountsTest, SingleRecord) {
  const FeatureTable table = Parse("f1\ta\t3\t1\n");
  ASSERT_EQ(table.num_features(), 1u);
  const auto& values = table.values("f1");
  ASSERT_EQ(values.size(), 1u);
  EXPECT_EQ(values[0].value_id, "a");
  EXPECT_EQ(values[0].count_c0, 3u);
  EXPECT_EQ(values[0].count_c1, 1u);
}

TEST(ParseCountsTest, DuplicatesAreSummed) {
  const FeatureTable table = Parse("f1\ta\t1\t0\nf1\ta\t2\t1\n");
  const auto& values = table.values("f1");
  ASSERT_EQ(values.size(), 1u);
  EXPECT_EQ(values[0].count_c0, 3u);
  EXPECT_EQ(values[0].count_c1, 1u);
}

TEST(ParseCountsTest, NegativeCountIsValidationError) {
  EXPECT_THROW(Parse("f1\ta\t-1\t2\n"), ValidationError);
}

TEST(ParseCountsTest, MalformedLineReportsLineNumber) {
  try {
    Parse("# header\nf1\ta\t1\t1\nf1\tb\t1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(Parse("f1\ta\tx\t1\n"), ParseError);
  EXPECT_THROW(Parse("f1\ta\t1\t1\textra\n"), ParseError);
}

TEST(ParseCountsTest, CommentsBlankLinesAndCrlf) {
  const FeatureTable table = Parse("# c\n\nf1\ta\t1\t2\r\nf2\tb\t0\t4\r\n");
  EXPECT_EQ(table.num_features(), 2u);
  EXPECT_EQ(table.values("f1")[0].count_c1, 2u);
  EXPECT_EQ(table.values("f2")[0].count_c1, 4u);
}

TEST(ParseCountsTest, ZeroCountRecordsDropped) {
  const FeatureTable table = Parse("f1\ta\t0\t0\nf1\tb\t1\t0\n");
  EXPECT_EQ(table.values("f1").size(), 1u);
  EXPECT_EQ(table.values("f1")[0].value_id, "b");
}

TEST(ParseCountsTest, UnknownFeatureThrows) {
  const FeatureTable table = Parse("f1\ta\t1\t0\n");
  EXPECT_THROW(table.values("nope"), ValidationError);
  EXPECT_THROW(EstimateDistribution(table, "nope"), ValidationError);
}

TEST(ParseCountsTest, DenseModeRequiresEqualTotals) {
  IngestOptions dense;
  dense.dense = true;
  EXPECT_NO_THROW(Parse("f1\ta\t1\t1\nf2\tb\t2\t0\n", dense));
  EXPECT_THROW(Parse("f1\ta\t1\t1\nf2\tb\t2\t1\n", dense), ValidationError);
  const FeatureTable sparse = Parse("f1\ta\t1\t1\nf2\tb\t2\t1\n");
  EXPECT_EQ(sparse.feature_total("f1"), 2u);
  EXPECT_EQ(sparse.feature_total("f2"), 3u);
}

TEST(ParseCountsTest, WriteCountsRoundTrips) {
  const FeatureTable table =
      Parse("f2\tz\t1\t5\nf1\tb\t2\t0\nf1\ta\t7\t3\nf1\tb\t1\t1\n");
  std::ostringstream out;
  WriteCounts(out, table);
  EXPECT_EQ(out.str(), "f1\ta\t7\t3\nf1\tb\t3\t1\nf2\tz\t1\t5\n");
  const FeatureTable again = Parse(out.str());
  std::ostringstream out2;
  WriteCounts(out2, again);
  EXPECT_EQ(out.str(), out2.str());
}

TEST(EstimateDistributionTest, SingleValue) {
  const SortedFeature f = EstimateDistribution(Parse("f\tx\t3\t1\n"), "f");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_DOUBLE_EQ(f.p_x[0], 1.0);
  EXPECT_DOUBLE_EQ(f.cond[0], 0.75);
}

TEST(EstimateDistributionTest, SortsByConditional) {
  const SortedFeature f =
      EstimateDistribution(Parse("f\ta\t1\t1\nf\tb\t0\t2\n"), "f");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f.value_ids[0], "b");
  EXPECT_EQ(f.value_ids[1], "a");
  EXPECT_DOUBLE_EQ(f.cond[0], 0.0);
  EXPECT_DOUBLE_EQ(f.cond[1], 0.5);
  EXPECT_DOUBLE_EQ(f.p_x[0], 0.5);
  EXPECT_DOUBLE_EQ(f.p_x[1], 0.5);
  EXPECT_DOUBLE_EQ(f.p0, 0.25);
}

TEST(EstimateDistributionTest, MinCountFilter) {
  const FeatureTable table = Parse("f\ta\t5\t5\nf\tb\t1\t0\n");
  const SortedFeature f = EstimateDistribution(table, "f", 2);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.value_ids[0], "a");
  EXPECT_THROW(EstimateDistribution(table, "f", 100), ValidationError);
}

TEST(EstimateDistributionTest, TiesBrokenByValueId) {
  const SortedFeature f = EstimateDistribution(
      Parse("f\tc\t1\t1\nf\ta\t2\t2\nf\tb\t3\t3\nf\td\t0\t1\n"), "f");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f.value_ids[0], "d");
  EXPECT_EQ(f.value_ids[1], "a");
  EXPECT_EQ(f.value_ids[2], "b");
  EXPECT_EQ(f.value_ids[3], "c");
}

TEST(EstimateDistributionTest, ExactRationalOrdering) {
  // z has c0 / total = 6004799503160661 / 2^54, the double nearest to 1/3,
  // and lies strictly below a's 1/3 even though both round to one double.
  const SortedFeature f = EstimateDistribution(
      Parse("f\ta\t1\t2\nf\tz\t6004799503160661\t12009599006321323\n"), "f");
  EXPECT_EQ(f.cond[0], f.cond[1]);
  EXPECT_EQ(f.value_ids[0], "z");
  EXPECT_EQ(f.value_ids[1], "a");
}

TEST(SortedFeatureTest, InvariantsOnRandomCounts) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const SortedFeature f = testing::RandomCountFeature(rng, 1 + trial % 40);
    double mass = 0.0;
    double p0 = 0.0;
    std::uint64_t c0 = 0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_GT(f.p_x[i], 0.0);
      if (i > 0) {
        EXPECT_LE(f.cond[i - 1], f.cond[i]);
      }
      mass += f.p_x[i];
      p0 += f.p_x[i] * f.cond[i];
      c0 += f.count_c0[i];
      total += f.count_c0[i] + f.count_c1[i];
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(f.p0, p0, 1e-12);
    EXPECT_NEAR(f.p0, static_cast<double>(c0) / static_cast<double>(total),
                1e-12);
  }
}

TEST(SortedFeatureTest, SortIsAPermutation) {
  const std::vector<double> p_x = {0.1, 0.4, 0.2, 0.3};
  const std::vector<double> cond = {0.9, 0.1, 0.5, 0.1};
  const SortedFeature f = SortedFeature::FromProbabilities(p_x, cond);
  ASSERT_EQ(f.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(f.p_x[i], p_x[f.original_index[i]]);
    EXPECT_DOUBLE_EQ(f.cond[i], cond[f.original_index[i]]);
  }
  // Equal conditionals keep input order.
  EXPECT_EQ(f.original_index[0], 1u);
  EXPECT_EQ(f.original_index[1], 3u);
}

TEST(SortedFeatureTest, DeterministicAcrossRuns) {
  const std::string text = "f\tq\t4\t1\nf\tr\t1\t4\nf\ts\t2\t2\nf\tt\t9\t1\n";
  const SortedFeature a = EstimateDistribution(Parse(text), "f");
  const SortedFeature b = EstimateDistribution(Parse(text), "f");
  EXPECT_EQ(a.value_ids, b.value_ids);
  EXPECT_EQ(a.p_x, b.p_x);
  EXPECT_EQ(a.cond, b.cond);
}

TEST(SortedFeatureTest, DegenerateLabelStillBuilds) {
  const SortedFeature f =
      EstimateDistribution(Parse("f\ta\t3\t0\nf\tb\t5\t0\n"), "f");
  EXPECT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f.p0, 1.0);
}

TEST(SortedFeatureTest, RejectsBadProbabilities) {
  const std::vector<double> p_x = {0.5, 0.0};
  const std::vector<double> cond = {0.5, 0.5};
  EXPECT_THROW(SortedFeature::FromProbabilities(p_x, cond), ValidationError);
  const std::vector<double> p_ok = {0.5, 0.5};
  const std::vector<double> cond_bad = {0.5, 1.5};
  EXPECT_THROW(SortedFeature::FromProbabilities(p_ok, cond_bad),
               ValidationError);
}

}  // namespace
}  // namespace vocab_squeeze
