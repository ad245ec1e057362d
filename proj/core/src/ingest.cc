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

#include "vocab_squeeze/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <utility>

#include "vocab_squeeze/errors.h"

namespace vocab_squeeze {
namespace {

std::uint64_t ParseCount(std::string_view field, std::size_t line,
                         const char* what) {
  if (field.empty()) throw ParseError(line, std::string("empty ") + what);
  if (field.front() == '-') {
    throw ValidationError("line " + std::to_string(line) + ": negative " +
                          what + " '" + std::string(field) + "'");
  }
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(line, std::string(what) + " out of range");
  }
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" +
                               std::string(field) + "'");
  }
  return value;
}

std::uint64_t CheckedAdd(std::uint64_t a, std::uint64_t b) {
  std::uint64_t sum = 0;
  if (__builtin_add_overflow(a, b, &sum)) {
    throw ValidationError("count overflow");
  }
  return sum;
}

// a0 / a < b0 / b, exactly.
bool RatioLess(std::uint64_t a0, std::uint64_t a, std::uint64_t b0,
               std::uint64_t b) {
  return static_cast<unsigned __int128>(a0) * b <
         static_cast<unsigned __int128>(b0) * a;
}

}  // namespace

FeatureTable FeatureTable::FromRecords(std::vector<LabeledCountRecord> records,
                                       const IngestOptions& options) {
  std::sort(records.begin(), records.end(),
            [](const LabeledCountRecord& a, const LabeledCountRecord& b) {
              if (a.feature_name != b.feature_name) {
                return a.feature_name < b.feature_name;
              }
              return a.value_id < b.value_id;
            });
  FeatureTable table;
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    ValueCounts merged{records[i].value_id, 0, 0};
    while (j < records.size() &&
           records[j].feature_name == records[i].feature_name &&
           records[j].value_id == records[i].value_id) {
      merged.count_c0 = CheckedAdd(merged.count_c0, records[j].count_c0);
      merged.count_c1 = CheckedAdd(merged.count_c1, records[j].count_c1);
      ++j;
    }
    if (merged.total() > 0) {
      auto& values = table.features_[records[i].feature_name];
      values.push_back(std::move(merged));
    }
    i = j;
  }

  std::optional<std::uint64_t> dense_total;
  for (const auto& [name, values] : table.features_) {
    std::uint64_t total = 0;
    for (const auto& v : values) total = CheckedAdd(total, v.total());
    table.total_instances_ = std::max(table.total_instances_, total);
    if (options.dense) {
      if (dense_total && *dense_total != total) {
        throw ValidationError("dense input: feature '" + name + "' has " +
                              std::to_string(total) + " instances, expected " +
                              std::to_string(*dense_total));
      }
      dense_total = total;
    }
  }
  return table;
}

bool FeatureTable::contains(std::string_view feature) const {
  return features_.find(feature) != features_.end();
}

const std::vector<ValueCounts>& FeatureTable::values(
    std::string_view feature) const {
  const auto it = features_.find(feature);
  if (it == features_.end()) {
    throw ValidationError("unknown feature '" + std::string(feature) + "'");
  }
  return it->second;
}

std::vector<std::string> FeatureTable::feature_names() const {
  std::vector<std::string> names;
  names.reserve(features_.size());
  for (const auto& [name, values] : features_) names.push_back(name);
  return names;
}

std::size_t FeatureTable::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, values] : features_) n += values.size();
  return n;
}

std::uint64_t FeatureTable::feature_total(std::string_view feature) const {
  std::uint64_t total = 0;
  for (const auto& v : values(feature)) total += v.total();
  return total;
}

FeatureTable ParseCounts(std::istream& in, const IngestOptions& options) {
  std::vector<LabeledCountRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    std::string_view rest(line);
    std::string_view fields[4];
    std::size_t count = 0;
    while (true) {
      const std::size_t tab = rest.find('\t');
      if (count == 4) {
        throw ParseError(line_no, "expected 4 tab-separated fields");
      }
      fields[count++] = rest.substr(0, tab);
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (count != 4) {
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(count));
    }
    if (fields[0].empty()) throw ParseError(line_no, "empty feature name");
    if (fields[1].empty()) throw ParseError(line_no, "empty value id");
    records.push_back({std::string(fields[0]), std::string(fields[1]),
                       ParseCount(fields[2], line_no, "count_c0"),
                       ParseCount(fields[3], line_no, "count_c1")});
  }
  return FeatureTable::FromRecords(std::move(records), options);
}

FeatureTable ReadCountsFile(const std::string& path,
                            const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return ParseCounts(in, options);
}

void WriteCounts(std::ostream& out, const FeatureTable& table) {
  for (const auto& name : table.feature_names()) {
    for (const auto& v : table.values(name)) {
      out << name << '\t' << v.value_id << '\t' << v.count_c0 << '\t'
          << v.count_c1 << '\n';
    }
  }
}

SortedFeature SortedFeature::FromCounts(std::string name,
                                        std::vector<std::string> value_ids,
                                        std::span<const std::uint64_t> count_c0,
                                        std::span<const std::uint64_t> count_c1) {
  const std::size_t n = count_c0.size();
  if (count_c1.size() != n || (!value_ids.empty() && value_ids.size() != n)) {
    throw ValidationError("count arrays differ in length");
  }
  if (n == 0) throw ValidationError("feature '" + name + "' has no values");

  std::uint64_t total = 0;
  std::uint64_t total_c0 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t t = CheckedAdd(count_c0[i], count_c1[i]);
    if (t == 0) throw ValidationError("value with zero count");
    total = CheckedAdd(total, t);
    total_c0 += count_c0[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::uint64_t ta = count_c0[a] + count_c1[a];
    const std::uint64_t tb = count_c0[b] + count_c1[b];
    if (RatioLess(count_c0[a], ta, count_c0[b], tb)) return true;
    if (RatioLess(count_c0[b], tb, count_c0[a], ta)) return false;
    if (!value_ids.empty() && value_ids[a] != value_ids[b]) {
      return value_ids[a] < value_ids[b];
    }
    return a < b;
  });

  SortedFeature f;
  f.name = std::move(name);
  f.original_index = order;
  f.p_x.resize(n);
  f.cond.resize(n);
  f.count_c0.resize(n);
  f.count_c1.resize(n);
  if (!value_ids.empty()) f.value_ids.resize(n);
  const double total_d = static_cast<double>(total);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    const std::uint64_t t = count_c0[src] + count_c1[src];
    f.count_c0[i] = count_c0[src];
    f.count_c1[i] = count_c1[src];
    f.p_x[i] = static_cast<double>(t) / total_d;
    f.cond[i] = static_cast<double>(count_c0[src]) / static_cast<double>(t);
    if (!value_ids.empty()) f.value_ids[i] = std::move(value_ids[src]);
  }
  f.total_count = total;
  f.p0 = static_cast<double>(total_c0) / total_d;
  return f;
}

SortedFeature SortedFeature::FromProbabilities(std::span<const double> p_x,
                                               std::span<const double> cond,
                                               std::string name) {
  const std::size_t n = p_x.size();
  if (cond.size() != n) throw ValidationError("p_x and cond differ in length");
  if (n == 0) throw ValidationError("feature has no values");
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p_x[i] > 0.0) || !std::isfinite(p_x[i])) {
      throw ValidationError("probability masses must be positive");
    }
    if (!(cond[i] >= 0.0 && cond[i] <= 1.0)) {
      throw ValidationError("conditional outside [0, 1]");
    }
    mass += p_x[i];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cond[a] < cond[b]; });

  SortedFeature f;
  f.name = std::move(name);
  f.original_index = order;
  f.p_x.resize(n);
  f.cond.resize(n);
  double p0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.p_x[i] = p_x[order[i]] / mass;
    f.cond[i] = cond[order[i]];
    p0 += f.p_x[i] * f.cond[i];
  }
  f.p0 = std::clamp(p0, 0.0, 1.0);
  return f;
}

SortedFeature EstimateDistribution(const FeatureTable& table,
                                   std::string_view feature,
                                   std::uint64_t min_count) {
  const auto& values = table.values(feature);
  std::vector<std::string> ids;
  std::vector<std::uint64_t> c0;
  std::vector<std::uint64_t> c1;
  for (const auto& v : values) {
    if (v.total() < min_count) continue;
    ids.push_back(v.value_id);
    c0.push_back(v.count_c0);
    c1.push_back(v.count_c1);
  }
  if (ids.empty()) {
    throw ValidationError("feature '" + std::string(feature) +
                          "' is empty after min_count filtering");
  }
  return SortedFeature::FromCounts(std::string(feature), std::move(ids), c0, c1);
}

}  // namespace vocab_squeeze
