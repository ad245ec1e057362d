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

#include "vocab_squeeze/allocator.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/greedy.h"
#include "vocab_squeeze/parallel.h"

namespace vocab_squeeze {
namespace {

void CheckBudget(std::span<const SortedFeature> features,
                 std::size_t total_budget) {
  if (features.empty()) throw ValidationError("no features to allocate");
  if (total_budget < features.size()) {
    throw ValidationError("budget " + std::to_string(total_budget) +
                          " is smaller than the number of features " +
                          std::to_string(features.size()));
  }
}

std::size_t Capacity(const SortedFeature& f) {
  return std::max<std::size_t>(1, f.size());
}

// Lowers budgets above capacity and hands the surplus out one unit at a
// time to features with room, cycling in `order`.
void ClampAndRedistribute(std::span<const SortedFeature> features,
                          const std::vector<std::size_t>& order,
                          std::vector<std::size_t>& budgets) {
  std::size_t surplus = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::size_t cap = Capacity(features[i]);
    if (budgets[i] > cap) {
      surplus += budgets[i] - cap;
      budgets[i] = cap;
    }
  }
  std::vector<std::size_t> open;
  for (const std::size_t i : order) {
    if (budgets[i] < Capacity(features[i])) open.push_back(i);
  }
  while (surplus > 0 && !open.empty()) {
    std::vector<std::size_t> still_open;
    for (const std::size_t i : open) {
      if (surplus == 0) break;
      ++budgets[i];
      --surplus;
      if (budgets[i] < Capacity(features[i])) still_open.push_back(i);
    }
    if (surplus == 0) break;
    open = std::move(still_open);
  }
}

// Indices by descending vocabulary size, then ascending index.
std::vector<std::size_t> LargestFirst(std::span<const SortedFeature> features) {
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return features[a].size() > features[b].size();
  });
  return order;
}

}  // namespace

GlobalAllocation AllocateGlobalSubmodular(
    std::span<const SortedFeature> features, std::size_t total_budget,
    LogBase base, int num_threads) {
  CheckBudget(features, total_budget);
  const std::size_t num_features = features.size();
  const std::size_t extra = total_budget - num_features;

  std::vector<std::vector<GreedyStep>> rankings(num_features);
  std::vector<double> mi_before(num_features, 0.0);
  ParallelFor(0, num_features, num_threads, [&](std::size_t f) {
    const SortedFeature& feature = features[f];
    if (feature.size() == 0) return;
    mi_before[f] = MutualInformation(feature, base);
    const std::size_t limit = std::min(feature.size() - 1, extra);
    if (limit == 0) return;
    BoundaryIndex index = BoundaryIndex::Build(feature, base);
    rankings[f] = MarginalRanking(index, limit);
  });

  // Each ranking is taken as a prefix, so a heap over the heads suffices.
  // Order: gain descending, then rank, then feature name.
  using Head = std::tuple<double, std::size_t, std::size_t>;  // gain, rank, f
  auto worse = [&](const Head& a, const Head& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    const std::string& na = features[std::get<2>(a)].name;
    const std::string& nb = features[std::get<2>(b)].name;
    if (na != nb) return na > nb;
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Head, std::vector<Head>, decltype(worse)> heads(worse);
  for (std::size_t f = 0; f < num_features; ++f) {
    if (!rankings[f].empty()) heads.push({rankings[f][0].gain, 0, f});
  }
  std::vector<std::size_t> taken(num_features, 0);
  for (std::size_t picked = 0; picked < extra && !heads.empty(); ++picked) {
    const auto [gain, rank, f] = heads.top();
    heads.pop();
    taken[f] = rank + 1;
    if (rank + 1 < rankings[f].size()) {
      heads.push({rankings[f][rank + 1].gain, rank + 1, f});
    }
  }

  GlobalAllocation out;
  out.boundaries.resize(num_features);
  std::vector<double> mi_after(num_features, 0.0);
  ParallelFor(0, num_features, num_threads, [&](std::size_t f) {
    std::vector<std::size_t> chosen;
    chosen.reserve(taken[f]);
    for (std::size_t r = 0; r < taken[f]; ++r) {
      chosen.push_back(rankings[f][r].boundary);
    }
    out.boundaries[f] = BoundarySet(features[f].size(), std::move(chosen));
    if (features[f].size() > 0) {
      mi_after[f] = EvaluatePartition(features[f], out.boundaries[f], base);
    }
  });

  for (std::size_t f = 0; f < num_features; ++f) {
    out.report.features.push_back({features[f].name, features[f].size(),
                                   taken[f] + 1, mi_before[f], mi_after[f]});
  }
  if (std::accumulate(mi_before.begin(), mi_before.end(), 0.0) > 0.0) {
    out.report.avg_mi_loss = AverageMiLoss(mi_before, mi_after);
  } else {
    out.report.warnings.push_back(
        "every feature has zero mutual information; loss reported as 0");
  }
  return out;
}

BudgetSplit AllocateUniform(std::span<const SortedFeature> features,
                            std::size_t total_budget) {
  CheckBudget(features, total_budget);
  const std::size_t num_features = features.size();
  BudgetSplit out;
  out.budgets.assign(num_features, total_budget / num_features);
  const std::vector<std::size_t> order = LargestFirst(features);
  for (std::size_t r = 0; r < total_budget % num_features; ++r) {
    ++out.budgets[order[r]];
  }
  ClampAndRedistribute(features, order, out.budgets);
  return out;
}

BudgetSplit AllocateMiProportional(std::span<const SortedFeature> features,
                                   std::size_t total_budget, LogBase base) {
  CheckBudget(features, total_budget);
  const std::size_t num_features = features.size();
  std::vector<double> mi(num_features, 0.0);
  for (std::size_t f = 0; f < num_features; ++f) {
    if (features[f].size() > 0) mi[f] = MutualInformation(features[f], base);
  }
  const double total_mi = std::accumulate(mi.begin(), mi.end(), 0.0);
  if (!(total_mi > 0.0)) {
    BudgetSplit out = AllocateUniform(features, total_budget);
    out.warnings.push_back(
        "total mutual information is zero; using uniform allocation");
    return out;
  }

  // Largest remainder apportionment.
  BudgetSplit out;
  out.budgets.resize(num_features);
  std::vector<double> remainder(num_features);
  std::size_t assigned = 0;
  for (std::size_t f = 0; f < num_features; ++f) {
    const double quota =
        static_cast<double>(total_budget) * (mi[f] / total_mi);
    const double whole = std::floor(quota);
    out.budgets[f] = static_cast<std::size_t>(whole);
    remainder[f] = quota - whole;
    assigned += out.budgets[f];
  }
  std::vector<std::size_t> order(num_features);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return features[a].size() > features[b].size();
  });
  for (std::size_t r = 0; assigned < total_budget; r = (r + 1) % num_features) {
    ++out.budgets[order[r]];
    ++assigned;
  }

  // Floor of one cluster, paid for by the currently largest budgets.
  for (std::size_t f = 0; f < num_features; ++f) {
    if (out.budgets[f] > 0) continue;
    out.budgets[f] = 1;
    std::size_t donor = 0;
    for (std::size_t g = 1; g < num_features; ++g) {
      if (out.budgets[g] > out.budgets[donor]) donor = g;
    }
    --out.budgets[donor];
  }

  std::vector<std::size_t> by_mi(num_features);
  std::iota(by_mi.begin(), by_mi.end(), std::size_t{0});
  std::stable_sort(by_mi.begin(), by_mi.end(),
                   [&](std::size_t a, std::size_t b) { return mi[a] > mi[b]; });
  ClampAndRedistribute(features, by_mi, out.budgets);
  return out;
}

double AverageMiLoss(std::span<const double> mi_before,
                     std::span<const double> mi_after) {
  if (mi_before.size() != mi_after.size()) {
    throw ValidationError("mismatched before/after lengths");
  }
  const double before = std::accumulate(mi_before.begin(), mi_before.end(), 0.0);
  const double after = std::accumulate(mi_after.begin(), mi_after.end(), 0.0);
  if (!(before > 0.0)) {
    throw DomainError("average MI loss is undefined when total MI is zero");
  }
  return std::clamp((before - after) / before, 0.0, 1.0);
}

}  // namespace vocab_squeeze
