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

#ifndef VOCAB_SQUEEZE_CLI_COMMANDS_H_
#define VOCAB_SQUEEZE_CLI_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "vocab_squeeze/distributed.h"
#include "vocab_squeeze/ingest.h"
#include "vocab_squeeze/mi_core.h"

namespace vocab_squeeze::cli {

enum class Method {
  kSubmodular,
  kSubmodularDistributed,
  kBucketing,
  kFrequency,
  kDivisive,
};

enum class Allocation { kGlobal, kUniform, kMi };

// Throw ValidationError on unknown names.
Method ParseMethod(std::string_view name);
Allocation ParseAllocation(std::string_view name);
LogBase ParseLogBase(std::string_view name);
std::string MethodName(Method method);
std::string AllocationName(Allocation allocation);

// Global for methods that support it, uniform otherwise. Throws
// ValidationError for bucketing or divisive with global allocation.
Allocation ResolveAllocation(Method method,
                             std::optional<Allocation> requested);

struct RunConfig {
  std::string input;
  std::string output;
  std::string report;
  Method method = Method::kSubmodular;
  std::size_t budget = 0;
  std::optional<Allocation> allocation;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::kTwo;
  std::uint64_t min_count = 1;
  std::optional<std::size_t> shards;
  // JSON-lines threshold trace for submodular-distributed; empty disables.
  std::string round_trace;
  // Fill wall_time_ms in the report. Off by default so reports are
  // byte-reproducible.
  bool timing = false;
  int num_threads = 1;
};

// Each feature's full vocabulary and the part that survives min_count,
// as parallel arrays sorted by feature name.
struct Dataset {
  std::vector<SortedFeature> full;
  // Size 0 when every value of the feature is below min_count.
  std::vector<SortedFeature> kept;
  // kept position -> full position.
  std::vector<std::vector<std::size_t>> kept_to_full;

  std::size_t size() const { return full.size(); }
  bool has_dropped(std::size_t f) const {
    return kept[f].size() < full[f].size();
  }
  std::size_t total_vocab() const;
};

Dataset PrepareDataset(const FeatureTable& table, std::uint64_t min_count,
                       int num_threads = 1);

struct FeatureOutcome {
  std::string name;
  std::size_t n = 0;
  // Number of clusters in the mapping.
  std::size_t m = 0;
  double mi_before = 0.0;
  double mi_after = 0.0;
  // Dense cluster id for each full sorted position.
  std::vector<std::uint32_t> cluster_of;
  std::vector<RoundTrace> rounds;
};

struct CompressOutcome {
  Allocation allocation = Allocation::kGlobal;
  std::vector<FeatureOutcome> features;
  double avg_mi_loss = 0.0;
  std::vector<std::string> warnings;
  double wall_time_ms = 0.0;
};

CompressOutcome CompressPrepared(const Dataset& data, const RunConfig& config);

void WriteMapping(std::ostream& out, const Dataset& data,
                  const CompressOutcome& outcome);
void WriteReport(std::ostream& out, const RunConfig& config,
                 const CompressOutcome& outcome);
void WriteRoundTraces(std::ostream& out, const CompressOutcome& outcome);

// Return a process exit code; diagnostics go to `err`.
int CmdCompress(const RunConfig& config, std::ostream& err);

struct CompareConfig {
  RunConfig base;
  // Entries are "method" or "method:allocation".
  std::vector<std::string> methods;
  std::vector<std::size_t> budgets;
  // CSV destination; empty writes to `out`.
  std::string output;
};

struct CompareCell {
  std::string method;
  std::string allocation;
  std::size_t budget = 0;
  std::optional<double> avg_mi_loss;
  std::string status;
};

std::vector<CompareCell> RunCompare(const Dataset& data,
                                    const CompareConfig& config,
                                    std::ostream& err);
void WriteCompareCsv(std::ostream& out, const std::vector<CompareCell>& cells);
int CmdCompare(const CompareConfig& config, std::ostream& out,
               std::ostream& err);

struct GenConfig {
  std::size_t vocab = 1000;
  std::size_t features = 1;
  double zipf = 1.1;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::string output;
};

int CmdGenSynthetic(const GenConfig& config, std::ostream& err);

}  // namespace vocab_squeeze::cli

#endif  // VOCAB_SQUEEZE_CLI_COMMANDS_H_
