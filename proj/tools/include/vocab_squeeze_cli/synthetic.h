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

#ifndef VOCAB_SQUEEZE_CLI_SYNTHETIC_H_
#define VOCAB_SQUEEZE_CLI_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vocab_squeeze/ingest.h"

namespace vocab_squeeze::cli {

struct SyntheticOptions {
  // Vocabulary of the first feature; feature j has max(1, vocab >> (j % 8)).
  std::size_t vocab = 1000;
  std::size_t features = 1;
  double zipf = 1.1;
  // Approximate count total per feature.
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

// One feature's counts, value ids "v<rank>" in rank order.
struct SyntheticColumn {
  std::vector<std::string> value_ids;
  std::vector<std::uint64_t> count_c0;
  std::vector<std::uint64_t> count_c1;
};

SyntheticColumn GenerateSyntheticColumn(std::size_t n, double zipf,
                                        std::uint64_t samples,
                                        std::uint64_t seed);

std::string SyntheticFeatureName(std::size_t j);

std::vector<LabeledCountRecord> GenerateSynthetic(
    const SyntheticOptions& options);

}  // namespace vocab_squeeze::cli

#endif  // VOCAB_SQUEEZE_CLI_SYNTHETIC_H_
