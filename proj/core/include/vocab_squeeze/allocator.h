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

#ifndef VOCAB_SQUEEZE_ALLOCATOR_H_
#define VOCAB_SQUEEZE_ALLOCATOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vocab_squeeze/ingest.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze {

struct FeatureAllocation {
  std::string name;
  std::size_t vocab_size = 0;
  // Compressed vocabulary size.
  std::size_t budget = 0;
  double mi_before = 0.0;
  double mi_after = 0.0;
};

struct AllocationReport {
  std::vector<FeatureAllocation> features;
  double avg_mi_loss = 0.0;
  std::vector<std::string> warnings;
};

struct GlobalAllocation {
  // Parallel to the input features.
  std::vector<BoundarySet> boundaries;
  AllocationReport report;
};

// Spends one vocabulary budget across features by merging their greedy
// marginal rankings: every feature keeps one cluster, and the remaining
// total_budget - #features boundaries go to the largest insertion gains
// overall (ties by feature name, then ranking position). Throws
// ValidationError when total_budget < #features.
GlobalAllocation AllocateGlobalSubmodular(
    std::span<const SortedFeature> features, std::size_t total_budget,
    LogBase base = LogBase::kTwo, int num_threads = 1);

struct BudgetSplit {
  std::vector<std::size_t> budgets;
  std::vector<std::string> warnings;
};

// floor(B / F) each; the remainder goes one apiece to the largest
// vocabularies. Budgets are clamped to vocabulary sizes and the surplus is
// handed out round-robin in the same priority order.
BudgetSplit AllocateUniform(std::span<const SortedFeature> features,
                            std::size_t total_budget);

// Budgets proportional to I(X_i;C) with largest-remainder rounding, at least
// one per feature, clamped and redistributed as in AllocateUniform. Falls
// back to the uniform split with a warning when every I(X_i;C) is zero.
BudgetSplit AllocateMiProportional(std::span<const SortedFeature> features,
                                   std::size_t total_budget,
                                   LogBase base = LogBase::kTwo);

// (sum_i X_i - Z_i) / sum_j X_j. Throws ValidationError when sum X_j = 0 or
// the spans differ in length.
double AverageMiLoss(std::span<const double> mi_before,
                     std::span<const double> mi_after);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_ALLOCATOR_H_
