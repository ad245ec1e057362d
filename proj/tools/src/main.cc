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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/parallel.h"
#include "vocab_squeeze_cli/commands.h"

namespace {

using vocab_squeeze::cli::RunConfig;

struct SharedFlags {
  std::string input;
  std::string method = "submodular";
  std::string allocation;
  std::string log_base = "2";
  std::string shards = "auto";
};

void AddSharedFlags(CLI::App* cmd, RunConfig& config, SharedFlags& flags) {
  cmd->add_option("--input", flags.input, "Counts TSV")->required();
  cmd->add_option("--epsilon", config.epsilon, "Approximation slack")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  cmd->add_option("--log-base", flags.log_base, "2 or e")
      ->check(CLI::IsMember({"2", "e"}))
      ->capture_default_str();
  cmd->add_option("--min-count", config.min_count,
                  "Values below this count go to the OOV cluster")
      ->capture_default_str();
  cmd->add_option("--shards", flags.shards,
                  "Shard count for submodular-distributed, or auto")
      ->capture_default_str();
}

// Validation errors surface as exit code 2.
void ApplyShared(const SharedFlags& flags, RunConfig& config) {
  config.input = flags.input;
  config.log_base = vocab_squeeze::cli::ParseLogBase(flags.log_base);
  if (flags.shards != "auto") {
    std::size_t pos = 0;
    unsigned long long shards = 0;
    try {
      shards = std::stoull(flags.shards, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != flags.shards.size() || shards == 0) {
      throw vocab_squeeze::ValidationError(
          "--shards must be a positive integer or auto");
    }
    config.shards = static_cast<std::size_t>(shards);
  }
  config.num_threads = vocab_squeeze::DefaultThreadCount();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-aware vocabulary compression for categorical features"};
  app.require_subcommand(1);

  RunConfig compress;
  SharedFlags compress_flags;
  CLI::App* compress_cmd =
      app.add_subcommand("compress", "Compress every feature to a budget");
  AddSharedFlags(compress_cmd, compress, compress_flags);
  compress_cmd->add_option("--output", compress.output, "Mapping TSV")
      ->required();
  compress_cmd->add_option("--report", compress.report, "Report JSON")
      ->required();
  compress_cmd
      ->add_option("--method", compress_flags.method,
                   "submodular, submodular-distributed, bucketing, frequency "
                   "or divisive")
      ->capture_default_str();
  compress_cmd->add_option("--budget", compress.budget,
                           "Total compressed vocabulary size")
      ->required();
  compress_cmd->add_option("--allocation", compress_flags.allocation,
                           "global, uniform or mi");
  compress_cmd->add_option("--round-trace", compress.round_trace,
                           "JSON-lines threshold trace (distributed only)");
  compress_cmd->add_flag("--timing", compress.timing,
                         "Record wall_time_ms in the report");

  vocab_squeeze::cli::CompareConfig compare;
  SharedFlags compare_flags;
  std::vector<std::string> methods;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Sweep methods and budgets into a CSV");
  AddSharedFlags(compare_cmd, compare.base, compare_flags);
  compare_cmd
      ->add_option("--methods", methods,
                   "Comma list of method or method:allocation")
      ->delimiter(',')
      ->required();
  compare_cmd->add_option("--budgets", compare.budgets, "Comma list of budgets")
      ->delimiter(',')
      ->required();
  compare_cmd->add_option("--output", compare.output,
                          "CSV path (default stdout)");

  vocab_squeeze::cli::GenConfig gen;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-synthetic", "Write a synthetic Zipfian counts TSV");
  gen_cmd->add_option("--vocab", gen.vocab, "Vocabulary of the largest feature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--features", gen.features, "Number of features")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--zipf", gen.zipf, "Zipf exponent")->capture_default_str();
  gen_cmd->add_option("--samples", gen.samples, "Count total per feature")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--output", gen.output, "Counts TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (compress_cmd->parsed()) {
      ApplyShared(compress_flags, compress);
      compress.method = vocab_squeeze::cli::ParseMethod(compress_flags.method);
      if (!compress_flags.allocation.empty()) {
        compress.allocation =
            vocab_squeeze::cli::ParseAllocation(compress_flags.allocation);
      }
      return vocab_squeeze::cli::CmdCompress(compress, std::cerr);
    }
    if (compare_cmd->parsed()) {
      ApplyShared(compare_flags, compare.base);
      for (const auto& m : methods) {
        if (!m.empty()) compare.methods.push_back(m);
      }
      return vocab_squeeze::cli::CmdCompare(compare, std::cout, std::cerr);
    }
    return vocab_squeeze::cli::CmdGenSynthetic(gen, std::cerr);
  } catch (const vocab_squeeze::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
