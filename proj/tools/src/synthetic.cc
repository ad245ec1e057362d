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

#include "vocab_squeeze_cli/synthetic.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "vocab_squeeze/errors.h"
#include "vocab_squeeze/random.h"

namespace vocab_squeeze::cli {
namespace {

// Positive-class rate of a value: a two-component Beta mixture.
double DrawConditional(std::mt19937_64& rng) {
  const bool high = UniformUnit(rng) < 0.5;
  const double a = high ? 6.0 : 2.0;
  const double b = high ? 2.0 : 6.0;
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

SyntheticColumn GenerateSyntheticColumn(std::size_t n, double zipf,
                                        std::uint64_t samples,
                                        std::uint64_t seed) {
  if (n == 0) throw ValidationError("synthetic vocabulary must be >= 1");
  if (!(zipf >= 0.0)) throw ValidationError("zipf exponent must be >= 0");
  std::vector<double> weight(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    weight[r] = std::pow(static_cast<double>(r + 1), -zipf);
    total += weight[r];
  }
  std::mt19937_64 rng(DeriveSeed(seed, 0));
  SyntheticColumn out;
  out.value_ids.reserve(n);
  out.count_c0.reserve(n);
  out.count_c1.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto count = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::llround(static_cast<double>(samples) * weight[r] / total)));
    const double theta = DrawConditional(rng);
    std::binomial_distribution<std::uint64_t> label(count, theta);
    const std::uint64_t c0 = label(rng);
    out.value_ids.push_back("v" + std::to_string(r));
    out.count_c0.push_back(c0);
    out.count_c1.push_back(count - c0);
  }
  return out;
}

std::string SyntheticFeatureName(std::size_t j) {
  char name[32];
  std::snprintf(name, sizeof(name), "f%02zu", j);
  return name;
}

std::vector<LabeledCountRecord> GenerateSynthetic(
    const SyntheticOptions& options) {
  if (options.features == 0) throw ValidationError("need at least one feature");
  std::vector<LabeledCountRecord> records;
  for (std::size_t j = 0; j < options.features; ++j) {
    const std::size_t n = std::max<std::size_t>(1, options.vocab >> (j % 8));
    SyntheticColumn column = GenerateSyntheticColumn(
        n, options.zipf, options.samples, DeriveSeed(options.seed, j));
    const std::string name = SyntheticFeatureName(j);
    for (std::size_t r = 0; r < n; ++r) {
      records.push_back({name, std::move(column.value_ids[r]),
                         column.count_c0[r], column.count_c1[r]});
    }
  }
  return records;
}

}  // namespace vocab_squeeze::cli
