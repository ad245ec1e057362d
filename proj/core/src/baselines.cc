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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

constexpr double kRelativeTolerance = 1e-12;
constexpr double kMoveTolerance = 1e-15;

bool ClearlyGreater(double a, double b) {
  return a > b + kRelativeTolerance * std::max(std::abs(a), std::abs(b));
}

// Frequency used to rank values: the raw count when available.
double Frequency(const SortedFeature& f, std::size_t i) {
  return f.has_counts() ? static_cast<double>(f.count_c0[i] + f.count_c1[i])
                        : f.p_x[i];
}

std::uint64_t CountOf(const SortedFeature& f, std::size_t i) {
  return f.has_counts() ? f.count_c0[i] + f.count_c1[i] : 0;
}

// Ascending value id, falling back to input position.
bool IdLess(const SortedFeature& f, std::size_t a, std::size_t b) {
  if (!f.value_ids.empty() && f.value_ids[a] != f.value_ids[b]) {
    return f.value_ids[a] < f.value_ids[b];
  }
  return f.original_index[a] < f.original_index[b];
}

// Singletons for retained positions in sorted order, OOV last.
FrequencyResult BuildFrequencyResult(const SortedFeature& f,
                                     const std::vector<bool>& keep,
                                     std::uint64_t threshold) {
  FrequencyResult out;
  out.threshold = threshold;
  std::vector<std::uint32_t> cluster_of(f.size());
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (keep[i]) cluster_of[i] = next++;
  }
  out.retained = next;
  std::optional<std::uint32_t> oov;
  if (next < f.size()) {
    oov = next;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!keep[i]) cluster_of[i] = *oov;
    }
  }
  out.map = CompressionMap(std::move(cluster_of), next + (oov ? 1 : 0), oov);
  return out;
}

// Binary KL(x || c) in nats with 0 log 0 = 0.
double BinaryKl(double x, double c) {
  double d = 0.0;
  if (x > 0.0) {
    if (c <= 0.0) return std::numeric_limits<double>::infinity();
    d += x * std::log(x / c);
  }
  if (x < 1.0) {
    if (c >= 1.0) return std::numeric_limits<double>::infinity();
    d += (1.0 - x) * std::log((1.0 - x) / (1.0 - c));
  }
  return std::max(0.0, d);
}

}  // namespace

BucketingResult Bucketing(const SortedFeature& feature, std::size_t k_buckets,
                          LogBase base) {
  if (k_buckets == 0) throw ValidationError("bucketing needs k >= 1");
  const std::size_t n = feature.size();
  std::vector<std::uint32_t> cluster_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t bucket;
    if (feature.has_counts()) {
      // floor(k c0 / (c0 + c1)) in exact arithmetic.
      const auto c0 = static_cast<unsigned __int128>(feature.count_c0[i]);
      const auto total = static_cast<unsigned __int128>(feature.count_c0[i] +
                                                        feature.count_c1[i]);
      bucket = static_cast<std::size_t>(c0 * k_buckets / total);
    } else {
      bucket = static_cast<std::size_t>(
          std::floor(feature.cond[i] * static_cast<double>(k_buckets)));
    }
    cluster_of[i] = static_cast<std::uint32_t>(std::min(bucket, k_buckets - 1));
  }
  BucketingResult out;
  out.k_buckets = k_buckets;
  out.map = CompressionMap(std::move(cluster_of),
                           static_cast<std::uint32_t>(k_buckets));
  out.nonempty = out.map.num_nonempty();
  const MiContext ctx = ContextFor(feature, base);
  out.delta_max = ctx.degenerate() ? 0.0 : BucketingLossBound(k_buckets, ctx);
  return out;
}

double BucketingLossBound(std::size_t k_buckets, const MiContext& ctx) {
  if (k_buckets == 0) throw ValidationError("bucketing needs k >= 1");
  if (ctx.degenerate()) {
    throw DomainError("bucketing bound is undefined for a constant label");
  }
  const double k = static_cast<double>(k_buckets);
  double delta = 0.0;
  for (std::size_t j = 0; j < k_buckets; ++j) {
    const double a = static_cast<double>(j) / k;
    const double b = static_cast<double>(j + 1) / k;
    const double fa = ctx.Kernel(a);
    const double fb = ctx.Kernel(b);
    const double top = std::max(fa, fb);
    const double bottom =
        (ctx.p0() >= a && ctx.p0() <= b) ? 0.0 : std::min(fa, fb);
    delta = std::max(delta, top - bottom);
  }
  return delta;
}

FrequencyResult FrequencyFilter(const SortedFeature& feature,
                                std::size_t budget) {
  const std::size_t n = feature.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = Frequency(feature, a);
    const double fb = Frequency(feature, b);
    if (fa != fb) return fa > fb;
    return IdLess(feature, a, b);
  });
  const std::size_t retained = std::min(budget, n);
  std::vector<bool> keep(n, false);
  std::uint64_t threshold = 0;
  for (std::size_t r = 0; r < retained; ++r) {
    keep[order[r]] = true;
    threshold = CountOf(feature, order[r]);
  }
  return BuildFrequencyResult(feature, keep, threshold);
}

std::vector<FrequencyResult> GlobalFrequencyFilter(
    std::span<const SortedFeature> features, std::size_t budget) {
  struct Entry {
    double frequency;
    std::size_t feature;
    std::size_t position;
  };
  std::vector<Entry> entries;
  for (std::size_t f = 0; f < features.size(); ++f) {
    for (std::size_t i = 0; i < features[f].size(); ++i) {
      entries.push_back({Frequency(features[f], i), f, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.feature != b.feature) {
      const auto& na = features[a.feature].name;
      const auto& nb = features[b.feature].name;
      if (na != nb) return na < nb;
      return a.feature < b.feature;
    }
    return IdLess(features[a.feature], a.position, b.position);
  });

  std::vector<std::vector<bool>> keep(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    keep[f].assign(features[f].size(), false);
  }
  const std::size_t retained = std::min(budget, entries.size());
  std::uint64_t threshold = 0;
  for (std::size_t r = 0; r < retained; ++r) {
    keep[entries[r].feature][entries[r].position] = true;
    threshold = CountOf(features[entries[r].feature], entries[r].position);
  }
  std::vector<FrequencyResult> out;
  out.reserve(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) {
    out.push_back(BuildFrequencyResult(features[f], keep[f], threshold));
  }
  return out;
}

DivisiveResult DivisiveCluster(const SortedFeature& feature, std::size_t m,
                               const DivisiveOptions& options, LogBase base) {
  if (m == 0) throw ValidationError("divisive clustering needs m >= 1");
  const std::size_t n = feature.size();
  if (n == 0) throw ValidationError("empty feature");
  m = std::min(m, n);

  // Contiguous groups of roughly 1/m mass each, all non-empty.
  std::vector<std::size_t> cuts;
  {
    double cum = 0.0;
    std::size_t i = 0;
    for (std::size_t j = 1; j < m; ++j) {
      const double target = static_cast<double>(j) / static_cast<double>(m);
      const std::size_t low = cuts.empty() ? 1 : cuts.back() + 1;
      const std::size_t high = n - (m - j);
      while (i < n && cum + feature.p_x[i] / 2 < target) cum += feature.p_x[i++];
      cuts.push_back(std::clamp(i, low, high));
    }
  }
  std::vector<std::uint32_t> assign =
      CompressionMap::FromBoundaries(BoundarySet(n, cuts)).clusters();

  std::vector<double> mass(m);
  std::vector<double> c0(m);
  std::vector<std::size_t> members(m);
  auto recompute = [&] {
    std::fill(mass.begin(), mass.end(), 0.0);
    std::fill(c0.begin(), c0.end(), 0.0);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      mass[assign[i]] += feature.p_x[i];
      c0[assign[i]] += feature.p_x[i] * feature.cond[i];
      ++members[assign[i]];
    }
  };
  auto center = [&](std::size_t z) {
    return std::clamp(c0[z] / mass[z], 0.0, 1.0);
  };
  auto objective = [&] {
    return PartitionMi(
        feature, CompressionMap(assign, static_cast<std::uint32_t>(m)), base);
  };

  DivisiveResult out;
  recompute();
  out.objective_history.push_back(objective());

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    // Distinct centers ascending, each with the smallest cluster id holding it.
    std::vector<std::pair<double, std::uint32_t>> centers;
    for (std::uint32_t z = 0; z < m; ++z) {
      if (members[z] > 0) centers.push_back({center(z), z});
    }
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end(),
                              [](const auto& a, const auto& b) {
                                return a.first == b.first;
                              }),
                  centers.end());

    // KL(x || c) is decreasing in c below x and increasing above it, so the
    // nearest center is one of the two that bracket x.
    std::size_t moves = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = feature.cond[i];
      const auto it = std::lower_bound(
          centers.begin(), centers.end(), x,
          [](const auto& c, double v) { return c.first < v; });
      double best_d = std::numeric_limits<double>::infinity();
      std::uint32_t best_z = assign[i];
      auto consider = [&](const std::pair<double, std::uint32_t>& c) {
        const double d = BinaryKl(x, c.first);
        if (d < best_d || (d == best_d && c.second < best_z)) {
          best_d = d;
          best_z = c.second;
        }
      };
      if (it != centers.end()) consider(*it);
      if (it != centers.begin()) consider(*std::prev(it));
      // Stay put unless closer elsewhere by more than rounding noise.
      const double current = BinaryKl(x, center(assign[i]));
      if (best_z != assign[i] && best_d < current - kMoveTolerance) {
        assign[i] = best_z;
        ++moves;
      }
    }
    recompute();

    // Re-seed empty clusters with the value farthest from its own cluster.
    std::size_t reseeded = 0;
    for (std::uint32_t z = 0; z < m; ++z) {
      if (members[z] > 0) continue;
      double far_d = -1.0;
      std::size_t far_i = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (members[assign[i]] < 2) continue;
        const double d = BinaryKl(feature.cond[i], center(assign[i]));
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i == n) break;
      const std::uint32_t from = assign[far_i];
      mass[from] -= feature.p_x[far_i];
      c0[from] -= feature.p_x[far_i] * feature.cond[far_i];
      --members[from];
      assign[far_i] = z;
      mass[z] = feature.p_x[far_i];
      c0[z] = feature.p_x[far_i] * feature.cond[far_i];
      members[z] = 1;
      ++reseeded;
    }
    if (reseeded > 0) recompute();

    out.iterations = iter + 1;
    const double value = objective();
    const double previous = out.objective_history.back();
    if (value < previous - kRelativeTolerance * std::max(1.0, std::abs(previous))) {
      throw Error("divisive clustering objective decreased from " +
                  std::to_string(previous) + " to " + std::to_string(value));
    }
    out.objective_history.push_back(value);
    if (moves == 0 && reseeded == 0) {
      out.converged = true;
      break;
    }
  }
  out.map = CompressionMap(std::move(assign), static_cast<std::uint32_t>(m));
  return out;
}

BoundarySet DpOptimal(const SortedFeature& feature, std::size_t m,
                      LogBase base) {
  constexpr std::size_t kMaxN = 5000;
  const std::size_t n = feature.size();
  if (n > kMaxN) {
    throw ValidationError("dynamic program limited to n <= 5000, got " +
                          std::to_string(n));
  }
  if (m == 0) throw ValidationError("m = 0");
  if (n == 0) throw ValidationError("empty feature");
  m = std::min(m, n);

  const PrefixTables tables = PrefixTables::FromFeature(feature);
  const MiContext ctx = ContextFor(feature, base);
  auto block = [&](std::size_t a, std::size_t b) {
    if (ctx.degenerate()) return 0.0;
    const PrefixTables::Block blk = tables.Span(a, b);
    return blk.mass * ctx.Kernel(blk.cond);
  };

  // best[j][i]: optimum for the first i values in j clusters.
  const double kUnset = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(m + 1, std::vector<double>(n + 1, kUnset));
  std::vector<std::vector<std::size_t>> arg(m + 1, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) best[1][i] = block(0, i);
  for (std::size_t j = 2; j <= m; ++j) {
    for (std::size_t i = j; i <= n; ++i) {
      for (std::size_t t = j - 1; t < i; ++t) {
        const double value = best[j - 1][t] + block(t, i);
        if (best[j][i] == kUnset || ClearlyGreater(value, best[j][i])) {
          best[j][i] = value;
          arg[j][i] = t;
        }
      }
    }
  }
  std::vector<std::size_t> boundaries;
  for (std::size_t j = m, i = n; j > 1; --j) {
    i = arg[j][i];
    boundaries.push_back(i);
  }
  return BoundarySet(n, std::move(boundaries));
}

BoundarySet BruteForceOptimal(const SortedFeature& feature, std::size_t m,
                              std::span<const std::size_t> required,
                              LogBase base) {
  constexpr double kMaxSets = 1e6;
  const std::size_t n = feature.size();
  if (m == 0) throw ValidationError("m = 0");
  if (n == 0) throw ValidationError("empty feature");
  m = std::min(m, n);
  const BoundarySet fixed(n, std::vector<std::size_t>(required.begin(),
                                                      required.end()));
  if (fixed.size() > m - 1) {
    throw ValidationError("more required boundaries than m - 1");
  }
  std::vector<std::size_t> free;
  for (std::size_t s = 1; s < n; ++s) {
    if (!fixed.contains(s)) free.push_back(s);
  }
  const std::size_t choose = m - 1 - fixed.size();
  double sets = 1.0;
  for (std::size_t i = 0; i < choose; ++i) {
    sets = sets * static_cast<double>(free.size() - i) /
           static_cast<double>(i + 1);
  }
  if (sets > kMaxSets) {
    throw ValidationError("brute force over " + std::to_string(sets) +
                          " boundary sets exceeds the limit of 10^6");
  }

  // Lexicographic enumeration of `choose`-subsets of `free`.
  std::vector<std::size_t> pick(choose);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::optional<BoundarySet> best;
  double best_value = 0.0;
  while (true) {
    std::vector<std::size_t> set(fixed.begin(), fixed.end());
    for (const std::size_t p : pick) set.push_back(free[p]);
    BoundarySet candidate(n, std::move(set));
    const double value = EvaluatePartition(feature, candidate, base);
    if (!best || ClearlyGreater(value, best_value)) {
      best = std::move(candidate);
      best_value = value;
    }
    // Advance to the next combination.
    std::size_t k = choose;
    while (k > 0 && pick[k - 1] == free.size() - choose + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t r = k; r < choose; ++r) pick[r] = pick[r - 1] + 1;
  }
  return *best;
}

}  // namespace vocab_squeeze
