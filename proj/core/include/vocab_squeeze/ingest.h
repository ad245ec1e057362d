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

#ifndef VOCAB_SQUEEZE_INGEST_H_
#define VOCAB_SQUEEZE_INGEST_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vocab_squeeze {

// One line of the aggregated count format.
struct LabeledCountRecord {
  std::string feature_name;
  std::string value_id;
  std::uint64_t count_c0 = 0;
  std::uint64_t count_c1 = 0;
};

struct ValueCounts {
  std::string value_id;
  std::uint64_t count_c0 = 0;
  std::uint64_t count_c1 = 0;

  std::uint64_t total() const { return count_c0 + count_c1; }
};

struct IngestOptions {
  // Dense data: every instance carries every feature, so all per-feature
  // totals must agree. Otherwise each feature's own total is its sample size.
  bool dense = false;
};

// Aggregated (feature, value) -> label counts. Values of each feature are
// unique and ordered by value_id; all-zero records are dropped.
class FeatureTable {
 public:
  FeatureTable() = default;

  // Merges duplicate (feature, value) pairs by summing their counts.
  static FeatureTable FromRecords(std::vector<LabeledCountRecord> records,
                                  const IngestOptions& options = {});

  bool contains(std::string_view feature) const;
  // Throws ValidationError for an unknown feature.
  const std::vector<ValueCounts>& values(std::string_view feature) const;
  std::vector<std::string> feature_names() const;
  std::size_t num_features() const { return features_.size(); }
  std::size_t num_values() const;

  // Sum of counts over all values of `feature`.
  std::uint64_t feature_total(std::string_view feature) const;
  // Largest per-feature total; equals every feature's total for dense data.
  std::uint64_t total_instances() const { return total_instances_; }

 private:
  std::map<std::string, std::vector<ValueCounts>, std::less<>> features_;
  std::uint64_t total_instances_ = 0;
};

// Reads `feature<TAB>value<TAB>count_c0<TAB>count_c1` lines. `#` lines and
// blank lines are skipped; CRLF is accepted. Throws ParseError on malformed
// lines and ValidationError on negative counts.
FeatureTable ParseCounts(std::istream& in, const IngestOptions& options = {});
FeatureTable ReadCountsFile(const std::string& path,
                            const IngestOptions& options = {});
void WriteCounts(std::ostream& out, const FeatureTable& table);

// One feature's values sorted ascending by P(C=0|X=x). This ordering is the
// ground set {1..n} of the partition objective: position i (0-based here)
// holds the (i+1)-th smallest conditional.
struct SortedFeature {
  std::string name;
  // Source value ids in sorted order. Empty when the feature was built from
  // bare arrays, in which case original_index identifies the values.
  std::vector<std::string> value_ids;
  // Index of each sorted value in the caller's input order.
  std::vector<std::size_t> original_index;
  std::vector<double> p_x;
  std::vector<double> cond;
  // Present only for count-backed features.
  std::vector<std::uint64_t> count_c0;
  std::vector<std::uint64_t> count_c1;
  std::uint64_t total_count = 0;
  double p0 = 0.0;

  std::size_t size() const { return p_x.size(); }
  bool has_counts() const { return !count_c0.empty(); }

  // Ties in the conditional are broken by ascending value id, or by input
  // position when `value_ids` is empty. Conditionals are compared exactly as
  // rationals c0/(c0+c1).
  static SortedFeature FromCounts(std::string name,
                                  std::vector<std::string> value_ids,
                                  std::span<const std::uint64_t> count_c0,
                                  std::span<const std::uint64_t> count_c1);

  // Masses are normalized to sum to one; ties broken by input position.
  static SortedFeature FromProbabilities(std::span<const double> p_x,
                                         std::span<const double> cond,
                                         std::string name = {});
};

// Maximum-likelihood estimate of P(X) and P(C=0|X) for one feature, keeping
// values that occur at least `min_count` times.
SortedFeature EstimateDistribution(const FeatureTable& table,
                                   std::string_view feature,
                                   std::uint64_t min_count = 1);

}  // namespace vocab_squeeze

#endif  // VOCAB_SQUEEZE_INGEST_H_
