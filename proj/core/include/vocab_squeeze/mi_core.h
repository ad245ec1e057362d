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

#ifndef VOCAB_SQUEEZE_MI_CORE_H_
#define VOCAB_SQUEEZE_MI_CORE_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "vocab_squeeze/ingest.h"

namespace vocab_squeeze {

enum class LogBase { kTwo, kE };

// Label prior and logarithm base shared by every information quantity.
//
// For a binary label with prior p0 = P(C=0), the mutual information of any
// partition Z of X is  I(Z;C) = sum_z P(z) f(P(C=0|z))  where
//
//   f(t) = t log(t / p0) + (1 - t) log((1 - t) / (1 - p0))
//
// is the KL divergence of Bernoulli(t) from the prior. f is convex,
// non-negative and vanishes at t = p0. With the 0 log 0 = 0 convention it is
// finite on all of [0, 1].
class MiContext {
 public:
  explicit MiContext(double p0, LogBase base = LogBase::kTwo);

  double p0() const { return p0_; }
  LogBase base() const { return base_; }
  // p0 is 0 or 1: the label is constant and every MI quantity is zero.
  bool degenerate() const { return degenerate_; }

  // f(t). Throws DomainError when degenerate() or t is outside [0, 1].
  double Kernel(double t) const;

 private:
  double p0_;
  LogBase base_;
  bool degenerate_;
  double log_p0_ = 0.0;
  double log_p1_ = 0.0;
  double scale_ = 1.0;
};

// f(t) for the context's prior; see MiContext.
double DivergenceKernel(double t, const MiContext& ctx);

// Interior split points S of a vocabulary of size n: strictly increasing
// values in [1, n-1]. m-1 boundaries define m consecutive clusters, cluster j
// covering sorted positions (s_{j-1}, s_j] with s_0 = 0 and s_m = n.
class BoundarySet {
 public:
  BoundarySet() = default;
  // Sorts the input. Throws RangeError for an element outside [1, n-1] and
  // ValidationError for duplicates.
  BoundarySet(std::size_t n, std::vector<std::size_t> boundaries);
  BoundarySet(std::size_t n, std::initializer_list<std::size_t> boundaries)
      : BoundarySet(n, std::vector<std::size_t>(boundaries)) {}

  // {1, ..., n-1}.
  static BoundarySet All(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return boundaries_.size(); }
  bool empty() const { return boundaries_.empty(); }
  std::size_t num_clusters() const { return boundaries_.size() + 1; }
  bool contains(std::size_t s) const;
  const std::vector<std::size_t>& values() const { return boundaries_; }
  auto begin() const { return boundaries_.begin(); }
  auto end() const { return boundaries_.end(); }

  friend bool operator==(const BoundarySet&, const BoundarySet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> boundaries_;
};

// General value -> cluster assignment over sorted positions 0..n-1. Unlike a
// BoundarySet it can describe non-consecutive clusters (divisive clustering)
// and an out-of-vocabulary pool (frequency filtering). Clusters may be empty.
class CompressionMap {
 public:
  CompressionMap() = default;
  // Throws ValidationError if an id is >= num_clusters or the OOV id is.
  CompressionMap(std::vector<std::uint32_t> cluster_of,
                 std::uint32_t num_clusters,
                 std::optional<std::uint32_t> oov_cluster = std::nullopt);

  static CompressionMap FromBoundaries(const BoundarySet& boundaries);
  static CompressionMap Identity(std::size_t n);
  static CompressionMap SingleCluster(std::size_t n);

  std::size_t size() const { return cluster_of_.size(); }
  std::uint32_t cluster(std::size_t i) const { return cluster_of_[i]; }
  const std::vector<std::uint32_t>& clusters() const { return cluster_of_; }
  std::uint32_t num_clusters() const { return num_clusters_; }
  std::optional<std::uint32_t> oov_cluster() const { return oov_cluster_; }
  std::size_t num_nonempty() const;
  // True when every cluster occupies a contiguous run of sorted positions.
  bool IsConsecutive() const;

 private:
  std::vector<std::uint32_t> cluster_of_;
  std::uint32_t num_clusters_ = 0;
  std::optional<std::uint32_t> oov_cluster_;
};

// I(X;C) = sum_i P(x_i) f(P(C=0|x_i)). Zero when p0 is 0 or 1.
double MutualInformation(const SortedFeature& feature,
                         LogBase base = LogBase::kTwo);

// F(S) = I(Z;C) for the consecutive partition given by `boundaries`.
// Throws RangeError when boundaries.n() differs from the feature size.
double EvaluatePartition(const SortedFeature& feature,
                         const BoundarySet& boundaries,
                         LogBase base = LogBase::kTwo);

// Gain of splitting a block into a left part of mass p and conditional alpha
// and a right part of mass q and conditional beta:
//
//   p f(alpha) + q f(beta) - (p + q) f((p alpha + q beta) / (p + q)).
//
// Non-negative by convexity; clamped at zero against rounding. Returns zero
// for a degenerate prior. Throws ValidationError if p <= 0 or q <= 0.
double MarginalGain(double p, double q, double alpha, double beta,
                    const MiContext& ctx);

// I(Z;C) for an arbitrary map. Throws ValidationError if the map does not
// cover exactly the feature's values.
double PartitionMi(const SortedFeature& feature, const CompressionMap& map,
                   LogBase base = LogBase::kTwo);

// Context for a feature's own prior.
inline MiContext ContextFor(const SortedFeature& feature,
                            LogBase base = LogBase::kTwo) {
  return MiContext(feature.p0, base);
}

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_MI_CORE_H_
