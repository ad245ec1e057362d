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

#include "vocab_squeeze_cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "vocab_squeeze/allocator.h"
#include "vocab_squeeze/baselines.h"
#include "vocab_squeeze/boundary_index.h"
#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/greedy.h"
#include "vocab_squeeze/parallel.h"
#include "vocab_squeeze/random.h"
#include "vocab_squeeze_cli/synthetic.h"

namespace vocab_squeeze::cli {
namespace {

using Json = nlohmann::ordered_json;

// A partition of a feature's kept values, before lifting to the full
// vocabulary. Values in `oov` (if any) join the dropped values.
struct LocalMap {
  CompressionMap map;
  std::optional<std::uint32_t> oov;
  std::vector<RoundTrace> rounds;
};

LocalMap FromMap(CompressionMap map) {
  LocalMap out;
  out.oov = map.oov_cluster();
  out.map = std::move(map);
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Per-feature seeds depend on the feature name only.
std::uint64_t FeatureSeed(std::uint64_t seed, const std::string& name) {
  return DeriveSeed(seed, StableHash(name));
}

// Submodular, distributed and divisive partitions with `m` clusters.
LocalMap OptimizeFeature(const SortedFeature& kept, std::size_t m,
                         const RunConfig& config,
                         std::vector<std::string>& warnings) {
  const std::size_t n = kept.size();
  if (m >= n) return FromMap(CompressionMap::Identity(n));
  if (m <= 1) return FromMap(CompressionMap::SingleCluster(n));
  const std::uint64_t seed = FeatureSeed(config.seed, kept.name);
  switch (config.method) {
    case Method::kSubmodular: {
      BoundaryIndex index = BoundaryIndex::Build(kept, config.log_base);
      GreedyConfig greedy;
      greedy.m = m;
      greedy.epsilon = config.epsilon;
      greedy.seed = seed;
      GreedyResult result = StochasticGreedy(index, greedy);
      for (auto& w : result.warnings) warnings.push_back(kept.name + ": " + w);
      return FromMap(CompressionMap::FromBoundaries(result.boundaries));
    }
    case Method::kSubmodularDistributed: {
      const ShardPlan plan = PlanShards(n, m - 1, config.epsilon, config.shards);
      for (const auto& w : plan.warnings) warnings.push_back(kept.name + ": " + w);
      DistributedOptions options;
      options.base = config.log_base;
      DistributedResult result = RunThresholdRounds(plan, kept, options);
      LocalMap out =
          FromMap(CompressionMap::FromBoundaries(result.result.boundaries));
      out.rounds = std::move(result.rounds);
      return out;
    }
    case Method::kDivisive: {
      DivisiveOptions options;
      options.seed = seed;
      return FromMap(DivisiveCluster(kept, m, options, config.log_base).map);
    }
    default:
      throw Error("method does not optimize boundaries");
  }
}

// Frequency filter under a per-feature budget that counts the OOV cluster.
LocalMap FrequencyFeature(const SortedFeature& kept, std::size_t budget,
                          bool has_dropped) {
  const std::size_t n = kept.size();
  if (n + (has_dropped ? 1 : 0) <= budget) {
    return FromMap(CompressionMap::Identity(n));
  }
  return FromMap(FrequencyFilter(kept, budget - 1).map);
}

// Lifts a kept-value partition to the full vocabulary, renumbering clusters
// by first appearance in sorted order with the OOV cluster last.
FeatureOutcome Lift(const Dataset& data, std::size_t f, const LocalMap& local,
                    LogBase base) {
  const SortedFeature& full = data.full[f];
  const std::size_t n = full.size();
  constexpr std::uint32_t kOov = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> raw(n, kOov);
  for (std::size_t k = 0; k < data.kept[f].size(); ++k) {
    const std::uint32_t c = local.map.cluster(k);
    raw[data.kept_to_full[f][k]] = (local.oov && c == *local.oov) ? kOov : c;
  }
  std::vector<std::uint32_t> dense_of(local.map.num_clusters(), kOov);
  std::uint32_t next = 0;
  bool any_oov = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i] == kOov) {
      any_oov = true;
      continue;
    }
    if (dense_of[raw[i]] == kOov) dense_of[raw[i]] = next++;
  }
  FeatureOutcome out;
  out.name = full.name;
  out.n = n;
  out.cluster_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.cluster_of[i] = raw[i] == kOov ? next : dense_of[raw[i]];
  }
  out.m = next + (any_oov ? 1 : 0);
  out.mi_before = MutualInformation(full, base);
  out.mi_after = PartitionMi(
      full, CompressionMap(out.cluster_of, static_cast<std::uint32_t>(out.m)),
      base);
  out.rounds = local.rounds;
  return out;
}

std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return s;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void Finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace

Method ParseMethod(std::string_view name) {
  if (name == "submodular") return Method::kSubmodular;
  if (name == "submodular-distributed") return Method::kSubmodularDistributed;
  if (name == "bucketing") return Method::kBucketing;
  if (name == "frequency") return Method::kFrequency;
  if (name == "divisive") return Method::kDivisive;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

Allocation ParseAllocation(std::string_view name) {
  if (name == "global") return Allocation::kGlobal;
  if (name == "uniform") return Allocation::kUniform;
  if (name == "mi") return Allocation::kMi;
  throw ValidationError("unknown allocation '" + std::string(name) + "'");
}

LogBase ParseLogBase(std::string_view name) {
  if (name == "2") return LogBase::kTwo;
  if (name == "e") return LogBase::kE;
  throw ValidationError("log base must be 2 or e, got '" + std::string(name) +
                        "'");
}

std::string MethodName(Method method) {
  switch (method) {
    case Method::kSubmodular:
      return "submodular";
    case Method::kSubmodularDistributed:
      return "submodular-distributed";
    case Method::kBucketing:
      return "bucketing";
    case Method::kFrequency:
      return "frequency";
    case Method::kDivisive:
      return "divisive";
  }
  return "unknown";
}

std::string AllocationName(Allocation allocation) {
  switch (allocation) {
    case Allocation::kGlobal:
      return "global";
    case Allocation::kUniform:
      return "uniform";
    case Allocation::kMi:
      return "mi";
  }
  return "unknown";
}

Allocation ResolveAllocation(Method method,
                             std::optional<Allocation> requested) {
  const bool per_feature_only =
      method == Method::kBucketing || method == Method::kDivisive;
  if (!requested) {
    return per_feature_only ? Allocation::kUniform : Allocation::kGlobal;
  }
  if (per_feature_only && *requested == Allocation::kGlobal) {
    throw ValidationError(MethodName(method) +
                          " has no global allocation; use uniform or mi");
  }
  return *requested;
}

std::size_t Dataset::total_vocab() const {
  std::size_t n = 0;
  for (const auto& f : full) n += f.size();
  return n;
}

Dataset PrepareDataset(const FeatureTable& table, std::uint64_t min_count,
                       int num_threads) {
  const std::vector<std::string> names = table.feature_names();
  if (names.empty()) throw ValidationError("input has no features");
  Dataset data;
  data.full.resize(names.size());
  data.kept.resize(names.size());
  data.kept_to_full.resize(names.size());
  ParallelFor(0, names.size(), num_threads, [&](std::size_t f) {
    data.full[f] = EstimateDistribution(table, names[f], 1);
    const SortedFeature& full = data.full[f];
    bool any_kept = false;
    bool all_kept = true;
    for (const auto& v : table.values(names[f])) {
      if (v.total() >= min_count) {
        any_kept = true;
      } else {
        all_kept = false;
      }
    }
    if (all_kept) {
      data.kept[f] = full;
      data.kept_to_full[f].resize(full.size());
      std::iota(data.kept_to_full[f].begin(), data.kept_to_full[f].end(),
                std::size_t{0});
      return;
    }
    data.kept[f].name = names[f];
    if (!any_kept) return;
    data.kept[f] = EstimateDistribution(table, names[f], min_count);
    // Both orders sort by (conditional, value id), so kept is a subsequence.
    const SortedFeature& kept = data.kept[f];
    for (std::size_t i = 0, k = 0; i < full.size() && k < kept.size(); ++i) {
      if (full.value_ids[i] == kept.value_ids[k]) {
        data.kept_to_full[f].push_back(i);
        ++k;
      }
    }
  });
  return data;
}

CompressOutcome CompressPrepared(const Dataset& data, const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  CompressOutcome out;
  out.allocation = ResolveAllocation(config.method, config.allocation);
  const std::size_t num_features = data.size();
  if (config.budget < num_features) {
    throw ValidationError("budget " + std::to_string(config.budget) +
                          " is smaller than the number of features " +
                          std::to_string(num_features));
  }
  if (!(config.epsilon > 0.0 && config.epsilon <= 0.5)) {
    throw ValidationError("epsilon must lie in (0, 0.5]");
  }

  std::size_t partial_drops = 0;
  for (std::size_t f = 0; f < num_features; ++f) {
    if (data.has_dropped(f) && data.kept[f].size() > 0) ++partial_drops;
  }

  // Per-feature cluster budgets, each counting a possible OOV cluster.
  std::vector<std::size_t> budgets(num_features, 0);
  std::vector<LocalMap> local(num_features);
  std::vector<bool> done(num_features, false);
  if (out.allocation == Allocation::kGlobal) {
    const std::size_t available = config.budget - partial_drops;
    if (available < num_features) {
      throw ValidationError(
          "budget cannot cover one cluster per feature plus OOV clusters");
    }
    if (config.method == Method::kFrequency) {
      std::vector<FrequencyResult> kept_maps =
          GlobalFrequencyFilter(data.kept, config.budget - num_features);
      for (std::size_t f = 0; f < num_features; ++f) {
        local[f] = FromMap(std::move(kept_maps[f].map));
        done[f] = true;
      }
    } else {
      GlobalAllocation global = AllocateGlobalSubmodular(
          data.kept, available, config.log_base, config.num_threads);
      for (auto& w : global.report.warnings) out.warnings.push_back(w);
      for (std::size_t f = 0; f < num_features; ++f) {
        budgets[f] = global.report.features[f].budget +
                     (data.has_dropped(f) && data.kept[f].size() > 0 ? 1 : 0);
        if (config.method == Method::kSubmodular) {
          local[f] = FromMap(data.kept[f].size() == 0
                                 ? CompressionMap()
                                 : CompressionMap::FromBoundaries(
                                       global.boundaries[f]));
          done[f] = true;
        }
      }
    }
  } else {
    BudgetSplit split =
        out.allocation == Allocation::kUniform
            ? AllocateUniform(data.full, config.budget)
            : AllocateMiProportional(data.full, config.budget, config.log_base);
    budgets = std::move(split.budgets);
    for (auto& w : split.warnings) out.warnings.push_back(w);
  }

  std::vector<std::vector<std::string>> feature_warnings(num_features);
  out.features.resize(num_features);
  ParallelFor(0, num_features, config.num_threads, [&](std::size_t f) {
    const SortedFeature& kept = data.kept[f];
    const bool dropped = data.has_dropped(f);
    if (!done[f]) {
      if (kept.size() == 0) {
        local[f] = FromMap(CompressionMap());
      } else if (config.method == Method::kFrequency) {
        local[f] = FrequencyFeature(kept, budgets[f], dropped);
      } else {
        // One cluster is reserved for the dropped values.
        const std::size_t m = budgets[f] - (dropped ? 1 : 0);
        if (m == 0) {
          local[f] = FromMap(CompressionMap::SingleCluster(kept.size()));
          // Everything, dropped values included, shares one cluster.
          local[f].oov = 0;
        } else if (config.method == Method::kBucketing) {
          local[f] = FromMap(Bucketing(kept, m, config.log_base).map);
        } else {
          local[f] = OptimizeFeature(kept, m, config, feature_warnings[f]);
        }
      }
    }
    out.features[f] = Lift(data, f, local[f], config.log_base);
  });
  for (auto& ws : feature_warnings) {
    for (auto& w : ws) out.warnings.push_back(std::move(w));
  }

  std::vector<double> before;
  std::vector<double> after;
  for (const auto& f : out.features) {
    before.push_back(f.mi_before);
    after.push_back(f.mi_after);
  }
  if (std::accumulate(before.begin(), before.end(), 0.0) > 0.0) {
    out.avg_mi_loss = AverageMiLoss(before, after);
  } else {
    out.avg_mi_loss = 0.0;
    out.warnings.push_back("total mutual information is zero; loss is 0");
  }
  out.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return out;
}

void WriteMapping(std::ostream& out, const Dataset& data,
                  const CompressOutcome& outcome) {
  std::string buffer;
  for (std::size_t f = 0; f < data.size(); ++f) {
    const SortedFeature& full = data.full[f];
    std::vector<std::size_t> order(full.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return full.value_ids[a] < full.value_ids[b];
    });
    buffer.clear();
    for (const std::size_t i : order) {
      buffer += full.name;
      buffer += '\t';
      buffer += full.value_ids[i];
      buffer += '\t';
      buffer += std::to_string(outcome.features[f].cluster_of[i]);
      buffer += '\n';
    }
    out << buffer;
  }
}

void WriteReport(std::ostream& out, const RunConfig& config,
                 const CompressOutcome& outcome) {
  Json report;
  report["method"] = MethodName(config.method);
  report["allocation"] = AllocationName(outcome.allocation);
  Json params;
  params["budget"] = config.budget;
  params["epsilon"] = config.epsilon;
  params["seed"] = config.seed;
  params["log_base"] = config.log_base == LogBase::kTwo ? "2" : "e";
  params["min_count"] = config.min_count;
  params["shards"] = config.shards ? Json(*config.shards) : Json("auto");
  report["params"] = std::move(params);
  Json per_feature = Json::object();
  for (const auto& f : outcome.features) {
    per_feature[f.name] = {{"n", f.n},
                           {"m", f.m},
                           {"mi_before_bits", f.mi_before},
                           {"mi_after_bits", f.mi_after}};
  }
  report["per_feature"] = std::move(per_feature);
  report["avg_mi_loss"] = outcome.avg_mi_loss;
  report["wall_time_ms"] =
      config.timing ? Json(outcome.wall_time_ms) : Json(nullptr);
  report["warnings"] = outcome.warnings;
  out << report.dump(2) << '\n';
}

void WriteRoundTraces(std::ostream& out, const CompressOutcome& outcome) {
  for (const auto& f : outcome.features) {
    std::ostringstream lines;
    WriteRoundTrace(lines, f.rounds);
    std::istringstream in(lines.str());
    const std::string prefix = "{\"feature\":" + Json(f.name).dump() + ",";
    for (std::string line; std::getline(in, line);) {
      out << prefix << line.substr(1) << '\n';
    }
  }
}

int CmdCompress(const RunConfig& config, std::ostream& err) {
  try {
    if (config.input.empty() || config.output.empty() ||
        config.report.empty()) {
      throw ValidationError("--input, --output and --report are required");
    }
    if (config.budget == 0) throw ValidationError("--budget must be >= 1");
    ResolveAllocation(config.method, config.allocation);
    const auto start = std::chrono::steady_clock::now();
    const FeatureTable table = ReadCountsFile(config.input);
    const Dataset data =
        PrepareDataset(table, config.min_count, config.num_threads);
    CompressOutcome outcome = CompressPrepared(data, config);
    outcome.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    {
      std::ofstream mapping = OpenOutput(config.output);
      WriteMapping(mapping, data, outcome);
      Finish(mapping, config.output);
    }
    {
      std::ofstream report = OpenOutput(config.report);
      WriteReport(report, config, outcome);
      Finish(report, config.report);
    }
    if (!config.round_trace.empty()) {
      std::ofstream trace = OpenOutput(config.round_trace);
      WriteRoundTraces(trace, outcome);
      Finish(trace, config.round_trace);
    }
    for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<CompareCell> RunCompare(const Dataset& data,
                                    const CompareConfig& config,
                                    std::ostream& err) {
  std::vector<CompareCell> cells;
  for (const std::string& entry : config.methods) {
    for (const std::size_t budget : config.budgets) {
      CompareCell cell;
      cell.budget = budget;
      const std::size_t colon = entry.find(':');
      cell.method = entry.substr(0, colon);
      try {
        RunConfig run = config.base;
        run.method = ParseMethod(cell.method);
        run.allocation =
            colon == std::string::npos
                ? std::nullopt
                : std::optional(ParseAllocation(entry.substr(colon + 1)));
        run.budget = budget;
        cell.allocation =
            AllocationName(ResolveAllocation(run.method, run.allocation));
        const CompressOutcome outcome = CompressPrepared(data, run);
        cell.avg_mi_loss = outcome.avg_mi_loss;
        cell.status = "ok";
      } catch (const std::exception& e) {
        if (cell.allocation.empty() && colon != std::string::npos) {
          cell.allocation = entry.substr(colon + 1);
        }
        cell.status = "failed: " + Sanitize(e.what());
        err << "warning: " << entry << " at budget " << budget
            << " failed: " << e.what() << '\n';
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void WriteCompareCsv(std::ostream& out, const std::vector<CompareCell>& cells) {
  out << "method,allocation,budget,avg_mi_loss,status\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.allocation << ',' << c.budget << ','
        << (c.avg_mi_loss ? FormatDouble(*c.avg_mi_loss) : std::string()) << ','
        << c.status << '\n';
  }
}

int CmdCompare(const CompareConfig& config, std::ostream& out,
               std::ostream& err) {
  try {
    if (config.methods.empty()) throw ValidationError("--methods is empty");
    if (config.budgets.empty()) throw ValidationError("--budgets is empty");
    if (config.base.input.empty()) throw ValidationError("--input is required");
    const FeatureTable table = ReadCountsFile(config.base.input);
    const Dataset data =
        PrepareDataset(table, config.base.min_count, config.base.num_threads);
    const std::vector<CompareCell> cells = RunCompare(data, config, err);
    if (config.output.empty()) {
      WriteCompareCsv(out, cells);
    } else {
      std::ofstream csv = OpenOutput(config.output);
      WriteCompareCsv(csv, cells);
      Finish(csv, config.output);
    }
    const bool all_ok = std::all_of(cells.begin(), cells.end(),
                                    [](const auto& c) { return c.status == "ok"; });
    return all_ok ? 0 : 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int CmdGenSynthetic(const GenConfig& config, std::ostream& err) {
  try {
    if (config.output.empty()) throw ValidationError("--output is required");
    SyntheticOptions options;
    options.vocab = config.vocab;
    options.features = config.features;
    options.zipf = config.zipf;
    options.samples = config.samples;
    options.seed = config.seed;
    const FeatureTable table = FeatureTable::FromRecords(GenerateSynthetic(options));
    std::ofstream out = OpenOutput(config.output);
    WriteCounts(out, table);
    Finish(out, config.output);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace vocab_squeeze::cli
