// Copyright 2026 The privlens Authors.
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

#ifndef PRIVLENS_IRR_HPP_
#define PRIVLENS_IRR_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/requirement_id.hpp"

namespace privlens::irr {

// N items by k categories; every row sums to m.
struct RatingsMatrix {
  std::size_t raters = 0;  // m
  std::vector<std::vector<std::uint32_t>> counts;

  std::size_t items() const noexcept { return counts.size(); }
  std::size_t categories() const noexcept { return counts.empty() ? 0 : counts.front().size(); }

  std::vector<std::string> violations() const;

  // "m <int>" header, then one whitespace-separated row per item. Lines
  // starting with '#' are ignored.
  static RatingsMatrix parse(std::istream& in);
};

enum class Statistic { kFleissKappa, kKrippendorffAlpha };

std::string_view to_string(Statistic statistic);

struct ReliabilityResult {
  Statistic statistic = Statistic::kKrippendorffAlpha;
  double value = 0;
  std::size_t n_units = 0;
  std::size_t n_skipped = 0;
  // Expected disagreement (or chance agreement complement) was zero; value
  // is pinned to 1.
  bool degenerate = false;
};

// 1 - J*M. J is 1 for two empty sets; a non-empty set against an empty one
// is disjoint.
template <typename T>
double masi_distance(const std::set<T>& a, const std::set<T>& b) {
  if (a == b) return 0.0;
  std::vector<T> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (common.empty()) return 1.0;
  // 1 - (i/u) * (m/3) as one rational, so the result is correctly rounded.
  const std::size_t inter = common.size();
  const std::size_t uni = a.size() + b.size() - inter;
  const std::size_t m = (inter == a.size() || inter == b.size()) ? 2 : 1;
  return static_cast<double>(3 * uni - inter * m) / static_cast<double>(3 * uni);
}

template <typename T>
double jaccard_distance(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<T> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return 1.0 - inter / (static_cast<double>(a.size() + b.size()) - inter);
}

template <typename T>
double nominal_distance(const T& a, const T& b) {
  return a == b ? 0.0 : 1.0;
}

using Distance = std::function<double(const LabelSet&, const LabelSet&)>;

enum class DistanceKind { kMasi, kJaccard, kNominal };

std::string_view to_string(DistanceKind kind);
std::optional<DistanceKind> parse_distance(std::string_view text);
Distance distance_function(DistanceKind kind);

struct Labeling {
  std::string coder;
  LabelSet labels;
};

struct Unit {
  std::string id;
  std::vector<Labeling> labelings;
};

using LabeledUnits = std::vector<Unit>;

// Tab-separated "unit  coder  R1,R2"; an empty third field is the empty set.
// Units keep first-appearance order. A repeated (unit, coder) replaces the
// earlier labeling.
LabeledUnits parse_labeled_units(std::istream& in);

// Throws ValidationError when the matrix violates its invariants.
ReliabilityResult fleiss_kappa(const RatingsMatrix& matrix);

// Coincidence-matrix form of alpha over ordered value pairs. Units with
// fewer than two labelings are skipped. Throws ValidationError("no
// comparable units") if nothing remains.
ReliabilityResult krippendorff_alpha(const LabeledUnits& units, const Distance& distance);

// Restricts every unit to the two coders and drops units missing either.
// Throws ValidationError when the coders share no unit.
ReliabilityResult pairwise_alpha(const LabeledUnits& units, std::string_view coder_a,
                                 std::string_view coder_b, const Distance& distance);

struct ConfidenceInterval {
  double lower = 0;
  double upper = 0;
  double level = 0.95;
  std::size_t iterations = 0;
  std::size_t degenerate_replicates = 0;
};

// Percentile interval over unit-resampled replicates; deterministic in
// `seed`.
ConfidenceInterval bootstrap_alpha(const LabeledUnits& units, const Distance& distance,
                                   std::size_t iterations, double level, std::uint64_t seed);

}  // namespace privlens::irr

#endif  // PRIVLENS_IRR_HPP_
