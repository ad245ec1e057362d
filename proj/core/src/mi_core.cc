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

#include "vocab_squeeze/mi_core.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

// Identical conditionals within rounding: the true gain is O(|a - b|^2).
constexpr double kSameConditional = 1e-14;

struct Accumulator {
  std::uint64_t count = 0;
  std::uint64_t c0 = 0;
  double mass = 0.0;
  double c0_mass = 0.0;
};

// Adds sorted position i to a cluster accumulator.
void Accumulate(const SortedFeature& f, std::size_t i, Accumulator& acc) {
  if (f.has_counts()) {
    acc.count += f.count_c0[i] + f.count_c1[i];
    acc.c0 += f.count_c0[i];
  } else {
    acc.mass += f.p_x[i];
    acc.c0_mass += f.p_x[i] * f.cond[i];
  }
}

// P(z) f(P(C=0|z)) for one cluster; empty clusters contribute nothing.
double ClusterTerm(const SortedFeature& f, const Accumulator& acc,
                   const MiContext& ctx) {
  double mass;
  double cond;
  if (f.has_counts()) {
    if (acc.count == 0) return 0.0;
    mass = static_cast<double>(acc.count) / static_cast<double>(f.total_count);
    cond = static_cast<double>(acc.c0) / static_cast<double>(acc.count);
  } else {
    if (acc.mass <= 0.0) return 0.0;
    mass = acc.mass;
    cond = std::clamp(acc.c0_mass / acc.mass, 0.0, 1.0);
  }
  return mass * ctx.Kernel(cond);
}

}  // namespace

MiContext::MiContext(double p0, LogBase base)
    : p0_(p0), base_(base), degenerate_(!(p0 > 0.0 && p0 < 1.0)) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) {
    throw DomainError("P(C=0) = " + std::to_string(p0) + " outside [0, 1]");
  }
  if (!degenerate_) {
    log_p0_ = std::log(p0);
    log_p1_ = std::log1p(-p0);
  }
  scale_ = base == LogBase::kTwo ? 1.0 / std::numbers::ln2 : 1.0;
}

double MiContext::Kernel(double t) const {
  if (degenerate_) {
    throw DomainError("f is undefined for a constant label");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("f evaluated outside [0, 1]");
  }
  const double left = t > 0.0 ? t * (std::log(t) - log_p0_) : 0.0;
  const double right = t < 1.0 ? (1.0 - t) * (std::log1p(-t) - log_p1_) : 0.0;
  return std::max(0.0, (left + right) * scale_);
}

double DivergenceKernel(double t, const MiContext& ctx) {
  return ctx.Kernel(t);
}

BoundarySet::BoundarySet(std::size_t n, std::vector<std::size_t> boundaries)
    : n_(n), boundaries_(std::move(boundaries)) {
  std::sort(boundaries_.begin(), boundaries_.end());
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    const std::size_t s = boundaries_[i];
    if (s < 1 || s + 1 > n) {
      throw RangeError("boundary " + std::to_string(s) + " outside [1, " +
                       std::to_string(n == 0 ? 0 : n - 1) + "]");
    }
    if (i > 0 && boundaries_[i - 1] == s) {
      throw ValidationError("duplicate boundary " + std::to_string(s));
    }
  }
}

BoundarySet BoundarySet::All(std::size_t n) {
  std::vector<std::size_t> all;
  for (std::size_t s = 1; s < n; ++s) all.push_back(s);
  return BoundarySet(n, std::move(all));
}

bool BoundarySet::contains(std::size_t s) const {
  return std::binary_search(boundaries_.begin(), boundaries_.end(), s);
}

CompressionMap::CompressionMap(std::vector<std::uint32_t> cluster_of,
                               std::uint32_t num_clusters,
                               std::optional<std::uint32_t> oov_cluster)
    : cluster_of_(std::move(cluster_of)),
      num_clusters_(num_clusters),
      oov_cluster_(oov_cluster) {
  for (const std::uint32_t c : cluster_of_) {
    if (c >= num_clusters_) {
      throw ValidationError("cluster id " + std::to_string(c) +
                            " out of range");
    }
  }
  if (oov_cluster_ && *oov_cluster_ >= num_clusters_) {
    throw ValidationError("OOV cluster id out of range");
  }
}

CompressionMap CompressionMap::FromBoundaries(const BoundarySet& boundaries) {
  std::vector<std::uint32_t> cluster_of(boundaries.n());
  std::uint32_t cluster = 0;
  auto next = boundaries.begin();
  for (std::size_t i = 0; i < boundaries.n(); ++i) {
    // Position i is value i+1; it starts a new cluster after a boundary at i.
    if (next != boundaries.end() && *next == i) {
      ++cluster;
      ++next;
    }
    cluster_of[i] = cluster;
  }
  return CompressionMap(std::move(cluster_of),
                        static_cast<std::uint32_t>(boundaries.num_clusters()));
}

CompressionMap CompressionMap::Identity(std::size_t n) {
  std::vector<std::uint32_t> cluster_of(n);
  for (std::size_t i = 0; i < n; ++i) cluster_of[i] = static_cast<std::uint32_t>(i);
  return CompressionMap(std::move(cluster_of), static_cast<std::uint32_t>(n));
}

CompressionMap CompressionMap::SingleCluster(std::size_t n) {
  return CompressionMap(std::vector<std::uint32_t>(n, 0), 1);
}

std::size_t CompressionMap::num_nonempty() const {
  std::vector<bool> used(num_clusters_, false);
  std::size_t count = 0;
  for (const std::uint32_t c : cluster_of_) {
    if (!used[c]) {
      used[c] = true;
      ++count;
    }
  }
  return count;
}

bool CompressionMap::IsConsecutive() const {
  std::vector<bool> closed(num_clusters_, false);
  for (std::size_t i = 1; i < cluster_of_.size(); ++i) {
    if (cluster_of_[i] == cluster_of_[i - 1]) continue;
    closed[cluster_of_[i - 1]] = true;
    if (closed[cluster_of_[i]]) return false;
  }
  return true;
}

double MutualInformation(const SortedFeature& feature, LogBase base) {
  const MiContext ctx = ContextFor(feature, base);
  if (ctx.degenerate()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    total += feature.p_x[i] * ctx.Kernel(feature.cond[i]);
  }
  return total;
}

double EvaluatePartition(const SortedFeature& feature,
                         const BoundarySet& boundaries, LogBase base) {
  if (boundaries.n() != feature.size()) {
    throw RangeError("boundary set over n = " + std::to_string(boundaries.n()) +
                     " applied to a feature with n = " +
                     std::to_string(feature.size()));
  }
  const MiContext ctx = ContextFor(feature, base);
  if (ctx.degenerate()) return 0.0;
  double total = 0.0;
  std::size_t start = 0;
  auto close_block = [&](std::size_t end) {
    Accumulator acc;
    for (std::size_t i = start; i < end; ++i) Accumulate(feature, i, acc);
    total += ClusterTerm(feature, acc, ctx);
    start = end;
  };
  for (const std::size_t s : boundaries) close_block(s);
  close_block(feature.size());
  return total;
}

double MarginalGain(double p, double q, double alpha, double beta,
                    const MiContext& ctx) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw ValidationError("marginal gain needs positive block masses");
  }
  if (ctx.degenerate() || std::abs(alpha - beta) <= kSameConditional) {
    return 0.0;
  }
  const double merged = std::clamp((p * alpha + q * beta) / (p + q), 0.0, 1.0);
  const double gain =
      p * ctx.Kernel(alpha) + q * ctx.Kernel(beta) - (p + q) * ctx.Kernel(merged);
  return std::max(0.0, gain);
}

double PartitionMi(const SortedFeature& feature, const CompressionMap& map,
                   LogBase base) {
  if (map.size() != feature.size()) {
    throw ValidationError("map covers " + std::to_string(map.size()) +
                          " values, feature has " +
                          std::to_string(feature.size()));
  }
  const MiContext ctx = ContextFor(feature, base);
  if (ctx.degenerate()) return 0.0;
  std::vector<Accumulator> clusters(map.num_clusters());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    Accumulate(feature, i, clusters[map.cluster(i)]);
  }
  double total = 0.0;
  for (const auto& acc : clusters) total += ClusterTerm(feature, acc, ctx);
  return total;
}

}  // namespace vocab_squeeze
