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

#ifndef VOCAB_SQUEEZE_DISTRIBUTED_H_
#define VOCAB_SQUEEZE_DISTRIBUTED_H_

// Sharded threshold greedy.
//
// Forced boundaries at every ceil(n / num_shards)-th position split the
// sorted values into contiguous shards. Since a gain query only reads the
// predecessor and successor of the candidate in S, and both shard edges are
// in S from the start, every query is answerable from the shard's own slice
// of the prefix tables. A coordinator then drives rounds with geometrically
// decaying thresholds w_i = (1 - eps)^i w_0; in each round every shard
// independently inserts all of its candidates whose current gain clears w_i.

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/greedy.h"
#include "vocab_squeeze/ingest.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze {

// Boundary positions lo < hi; the shard owns values lo+1..hi and candidates
// lo+1..hi-1.
struct ShardRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

struct ShardPlan {
  std::size_t n = 0;
  // Interior boundaries to select, forced ones included (vocabulary k + 1).
  std::size_t budget = 0;
  double epsilon = 0.0;
  std::size_t num_shards = 1;
  std::size_t shard_width = 0;
  std::vector<std::size_t> forced;
  std::vector<ShardRange> ranges;
  std::vector<std::string> warnings;
};

// num_shards = max(1, floor(eps k)) unless `shards_override` is given. Throws
// ValidationError if k = 0, k > n - 1 or eps is outside (0, 1). Falls back to
// a single shard (with a warning) when the forced boundaries alone would
// exhaust the budget.
ShardPlan PlanShards(std::size_t n, std::size_t budget, double epsilon,
                     std::optional<std::size_t> shards_override = std::nullopt);

// Coordinator -> shard.
struct RoundRequest {
  std::size_t round = 0;
  double threshold = 0.0;
  // Boundaries the coordinator can still accept; a shard never inserts more.
  std::size_t remaining_budget = 0;
};

// Shard -> coordinator: insertions of this round in order.
struct RoundReply {
  std::size_t shard = 0;
  std::vector<GreedyStep> inserted;
};

// State confined to one shard: the prefix-table slice for its range and the
// local boundary set seeded with the two edges.
class ShardWorker {
 public:
  ShardWorker(const SortedFeature& feature, std::size_t shard_id,
              ShardRange range, LogBase base);

  std::size_t id() const { return id_; }
  ShardRange range() const { return {index_.lo(), index_.hi()}; }
  std::size_t prefix_entries() const { return index_.tables().num_entries(); }

  // Largest single-candidate gain against the edges only.
  double MaxSingleGain() const;
  // Scans candidates in ascending order and inserts every one whose gain is
  // at least the threshold, up to the remaining budget.
  RoundReply HandleRound(const RoundRequest& request);

 private:
  std::size_t id_;
  BoundaryIndex index_;
};

// Message boundary between coordinator and shard. The in-process channel
// calls the worker directly; an RPC transport would implement the same two
// calls.
class ShardChannel {
 public:
  virtual ~ShardChannel() = default;
  virtual double Probe() = 0;
  virtual RoundReply Round(const RoundRequest& request) = 0;
  virtual std::size_t prefix_entries() const = 0;
};

class InProcessChannel : public ShardChannel {
 public:
  explicit InProcessChannel(ShardWorker worker) : worker_(std::move(worker)) {}
  double Probe() override { return worker_.MaxSingleGain(); }
  RoundReply Round(const RoundRequest& request) override {
    return worker_.HandleRound(request);
  }
  std::size_t prefix_entries() const override {
    return worker_.prefix_entries();
  }

 private:
  ShardWorker worker_;
};

struct RoundTrace {
  std::size_t round = 0;
  double threshold = 0.0;
  std::vector<std::size_t> inserted_per_shard;
};

struct DistributedOptions {
  LogBase base = LogBase::kTwo;
  int num_threads = 1;
};

struct DistributedResult {
  // Boundaries include the forced ones; steps list only the selected
  // (non-forced) boundaries that survived trimming, in acceptance order.
  // objective is recomputed from scratch on the final set.
  GreedyResult result;
  ShardPlan plan;
  std::vector<RoundTrace> rounds;
  double w0 = 0.0;
  // ceil(log_{1/(1-eps)} n) + 1.
  std::size_t round_limit = 0;
  std::size_t max_prefix_entries = 0;
  std::size_t trimmed = 0;
};

// Number of threshold rounds allowed for n candidates.
std::size_t ThresholdRoundLimit(std::size_t n, double epsilon);

DistributedResult RunThresholdRounds(const ShardPlan& plan,
                                     const SortedFeature& feature,
                                     const DistributedOptions& options = {});

struct TrimResult {
  BoundarySet boundaries;
  std::vector<GreedyStep> kept;
  std::size_t removed = 0;
};

// Drops the lowest-gain selected boundaries (latest first among equal
// gains) until forced + selected = budget. Forced boundaries are never
// removed.
TrimResult Trim(std::size_t n, const std::vector<std::size_t>& forced,
                std::vector<GreedyStep> selected, std::size_t budget);

// One JSON object per line: {"round", "threshold", "inserted_per_shard"}.
void WriteRoundTrace(std::ostream& out, const std::vector<RoundTrace>& rounds);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_DISTRIBUTED_H_
