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

#ifndef VOCAB_SQUEEZE_BASELINES_H_
#define VOCAB_SQUEEZE_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vocab_squeeze/ingest.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze {

// Equal-width bucketing of the conditional range: value i goes to bucket
// floor(cond_i * k), with cond = 1 falling into the last bucket [(k-1)/k, 1].
struct BucketingResult {
  std::size_t k_buckets = 0;
  // Cluster id = bucket index; empty buckets stay in the id space.
  CompressionMap map;
  std::size_t nonempty = 0;
  // Upper bound on I(X;C) - I(Z;C); see BucketingLossBound.
  double delta_max = 0.0;
};

BucketingResult Bucketing(const SortedFeature& feature, std::size_t k_buckets,
                          LogBase base = LogBase::kTwo);

// max_j (sup f - inf f) over the intervals [(j-1)/k, j/k]. By convexity the
// supremum is at an endpoint and the infimum is at an endpoint, or is
// f(p0) = 0 when p0 lies inside the interval. Throws DomainError for a
// degenerate prior.
double BucketingLossBound(std::size_t k_buckets, const MiContext& ctx);

// Keeps the `budget` most frequent values as singletons (ties by value id)
// and pools the rest into one out-of-vocabulary cluster.
struct FrequencyResult {
  // Smallest retained count; 0 when nothing is retained. For features
  // without counts, frequencies are the probability masses and the
  // threshold is reported as 0.
  std::uint64_t threshold = 0;
  CompressionMap map;
  std::size_t retained = 0;
};

FrequencyResult FrequencyFilter(const SortedFeature& feature,
                                std::size_t budget);

// Frequency filtering with one threshold across features: the `budget` most
// frequent (feature, value) pairs overall are retained (ties by feature
// name, then value id). Every feature gets an OOV cluster when it drops
// anything. Results are parallel to `features`.
std::vector<FrequencyResult> GlobalFrequencyFilter(
    std::span<const SortedFeature> features, std::size_t budget);

struct DivisiveOptions {
  std::size_t max_iters = 50;
  // Reserved for a randomized initialization; the contiguous equal-mass
  // initialization ignores it.
  std::uint64_t seed = 0;
};

struct DivisiveResult {
  CompressionMap map;
  std::size_t iterations = 0;
  bool converged = false;
  // I(Z;C) after initialization and after every iteration; non-decreasing.
  std::vector<double> objective_history;
};

// KL-divergence k-means over P(C|x): assign every value to the cluster whose
// conditional is closest in KL(P(C|x) || P(C|z)), then reset each cluster's
// conditional to the mass-weighted mean of its members. Starts from m
// contiguous equal-mass groups in sorted order. An emptied cluster is
// re-seeded with the value farthest (in KL) from its own cluster.
DivisiveResult DivisiveCluster(const SortedFeature& feature, std::size_t m,
                               const DivisiveOptions& options = {},
                               LogBase base = LogBase::kTwo);

// Exact optimum over consecutive partitions into at most m clusters by
// dynamic programming in O(n^2 m). Ties go to the smallest split. Throws
// ValidationError for n > 5000.
BoundarySet DpOptimal(const SortedFeature& feature, std::size_t m,
                      LogBase base = LogBase::kTwo);

// Exhaustive search over all (n-1 choose m-1) boundary sets containing
// `required`; ties go to the lexicographically smallest set. Throws
// ValidationError when more than 10^6 sets would be enumerated.
BoundarySet BruteForceOptimal(const SortedFeature& feature, std::size_t m,
                              std::span<const std::size_t> required = {},
                              LogBase base = LogBase::kTwo);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_BASELINES_H_
