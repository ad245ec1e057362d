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

#include "vocab_squeeze/distributed.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/parallel.h"

namespace vocab_squeeze {
namespace {

constexpr double kThresholdSlack = 1e-12;

}  // namespace

ShardPlan PlanShards(std::size_t n, std::size_t budget, double epsilon,
                     std::optional<std::size_t> shards_override) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (budget == 0) throw ValidationError("budget k = 0");
  if (n < 2 || budget > n - 1) {
    throw ValidationError("budget k = " + std::to_string(budget) +
                          " exceeds the n - 1 = " +
                          std::to_string(n == 0 ? 0 : n - 1) +
                          " available boundaries");
  }
  ShardPlan plan;
  plan.n = n;
  plan.budget = budget;
  plan.epsilon = epsilon;

  std::size_t shards;
  if (shards_override) {
    if (*shards_override == 0) throw ValidationError("shard count 0");
    shards = *shards_override;
  } else {
    // 1e-9 absorbs products such as 0.2 * 20 = 3.9999999999999996.
    shards = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(epsilon * static_cast<double>(budget) + 1e-9)));
  }
  shards = std::min(shards, n);
  if (shards - 1 >= budget) {
    plan.warnings.push_back(std::to_string(shards - 1) +
                            " forced boundaries would use the whole budget of " +
                            std::to_string(budget) + "; using a single shard");
    shards = 1;
  }

  plan.shard_width = (n + shards - 1) / shards;
  for (std::size_t j = 1; j < shards && j * plan.shard_width < n; ++j) {
    plan.forced.push_back(j * plan.shard_width);
  }
  plan.num_shards = plan.forced.size() + 1;
  std::size_t lo = 0;
  for (const std::size_t edge : plan.forced) {
    plan.ranges.push_back({lo, edge});
    lo = edge;
  }
  plan.ranges.push_back({lo, n});
  return plan;
}

ShardWorker::ShardWorker(const SortedFeature& feature, std::size_t shard_id,
                         ShardRange range, LogBase base)
    : id_(shard_id),
      index_(BoundaryIndex::BuildRange(feature, range.lo, range.hi, base)) {}

double ShardWorker::MaxSingleGain() const {
  double best = 0.0;
  for (std::size_t s = index_.lo() + 1; s < index_.hi(); ++s) {
    best = std::max(best, index_.QueryGain(s));
  }
  return best;
}

RoundReply ShardWorker::HandleRound(const RoundRequest& request) {
  RoundReply reply;
  reply.shard = id_;
  const double accept = request.threshold * (1.0 - kThresholdSlack);
  for (std::size_t s = index_.lo() + 1; s < index_.hi(); ++s) {
    if (reply.inserted.size() >= request.remaining_budget) break;
    if (index_.Contains(s)) continue;
    const double gain = index_.QueryGain(s);
    if (gain > 0.0 && gain >= accept) {
      reply.inserted.push_back({s, index_.Insert(s)});
    }
  }
  return reply;
}

std::size_t ThresholdRoundLimit(std::size_t n, double epsilon) {
  if (n <= 1) return 1;
  const double rounds =
      std::log(static_cast<double>(n)) / -std::log1p(-epsilon);
  // Guard against log ratios that land a hair above an integer.
  return static_cast<std::size_t>(std::ceil(rounds - 1e-9)) + 1;
}

DistributedResult RunThresholdRounds(const ShardPlan& plan,
                                     const SortedFeature& feature,
                                     const DistributedOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (plan.n != feature.size()) {
    throw ValidationError("shard plan is for n = " + std::to_string(plan.n) +
                          ", feature has n = " + std::to_string(feature.size()));
  }
  DistributedResult out;
  out.plan = plan;
  out.round_limit = ThresholdRoundLimit(plan.n, plan.epsilon);

  std::vector<std::unique_ptr<ShardChannel>> shards;
  shards.reserve(plan.ranges.size());
  for (std::size_t i = 0; i < plan.ranges.size(); ++i) {
    shards.push_back(std::make_unique<InProcessChannel>(
        ShardWorker(feature, i, plan.ranges[i], options.base)));
    out.max_prefix_entries =
        std::max(out.max_prefix_entries, shards.back()->prefix_entries());
  }

  std::vector<double> probes(shards.size(), 0.0);
  ParallelFor(0, shards.size(), options.num_threads,
              [&](std::size_t i) { probes[i] = shards[i]->Probe(); });
  out.w0 = *std::max_element(probes.begin(), probes.end());

  std::size_t remaining = plan.budget - plan.forced.size();
  std::vector<GreedyStep> selected;
  if (out.w0 > 0.0) {
    const double floor =
        out.w0 * plan.epsilon / static_cast<double>(plan.n);
    std::vector<RoundReply> replies(shards.size());
    for (std::size_t round = 0; round < out.round_limit && remaining > 0;
         ++round) {
      const double threshold =
          out.w0 * std::pow(1.0 - plan.epsilon, static_cast<double>(round));
      if (round > 0 && threshold < floor) break;
      const RoundRequest request{round, threshold, remaining};
      ParallelFor(0, shards.size(), options.num_threads, [&](std::size_t i) {
        replies[i] = shards[i]->Round(request);
      });

      RoundTrace trace{round, threshold, {}};
      std::size_t inserted = 0;
      for (const auto& reply : replies) {
        trace.inserted_per_shard.push_back(reply.inserted.size());
        inserted += reply.inserted.size();
        selected.insert(selected.end(), reply.inserted.begin(),
                        reply.inserted.end());
      }
      out.rounds.push_back(std::move(trace));
      remaining -= std::min(inserted, remaining);
    }
  }

  TrimResult trimmed = Trim(plan.n, plan.forced, std::move(selected), plan.budget);
  out.trimmed = trimmed.removed;
  out.result.boundaries = std::move(trimmed.boundaries);
  out.result.steps = std::move(trimmed.kept);
  out.result.objective =
      EvaluatePartition(feature, out.result.boundaries, options.base);
  out.result.warnings = plan.warnings;
  out.result.elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  return out;
}

TrimResult Trim(std::size_t n, const std::vector<std::size_t>& forced,
                std::vector<GreedyStep> selected, std::size_t budget) {
  TrimResult out;
  const std::size_t total = forced.size() + selected.size();
  if (total > budget) {
    out.removed = total - budget;
    if (out.removed > selected.size()) {
      throw ValidationError("forced boundaries exceed the budget");
    }
    std::vector<std::size_t> order(selected.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (selected[a].gain != selected[b].gain) {
        return selected[a].gain < selected[b].gain;
      }
      return a > b;
    });
    std::vector<bool> drop(selected.size(), false);
    for (std::size_t i = 0; i < out.removed; ++i) drop[order[i]] = true;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      if (!drop[i]) out.kept.push_back(selected[i]);
    }
  } else {
    out.kept = std::move(selected);
  }
  std::vector<std::size_t> all = forced;
  for (const auto& step : out.kept) all.push_back(step.boundary);
  out.boundaries = BoundarySet(n, std::move(all));
  return out;
}

void WriteRoundTrace(std::ostream& out, const std::vector<RoundTrace>& rounds) {
  char threshold[32];
  for (const auto& r : rounds) {
    std::snprintf(threshold, sizeof(threshold), "%.17g", r.threshold);
    out << "{\"round\":" << r.round << ",\"threshold\":" << threshold
        << ",\"inserted_per_shard\":[";
    for (std::size_t i = 0; i < r.inserted_per_shard.size(); ++i) {
      if (i > 0) out << ',';
      out << r.inserted_per_shard[i];
    }
    out << "]}\n";
  }
}

}  // namespace vocab_squeeze
