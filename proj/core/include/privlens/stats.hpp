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

#ifndef PRIVLENS_STATS_HPP_
#define PRIVLENS_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/gold.hpp"
#include "privlens/requirement_id.hpp"
#include "privlens/taxonomy.hpp"

namespace privlens::stats {

struct SamplingConfig {
  double confidence = 0.95;
  double interval = 5.0;  // percentage points
  double proportion = 0.5;

  std::vector<std::string> violations() const;
};

// Two-sided critical value, e.g. 1.959964 for 0.95.
double z_value(double confidence);

// Cochran's estimate with finite-population correction, rounded half-up and
// capped at the population.
std::size_t sample_size(std::size_t population, const SamplingConfig& config = {});

// Sorted indices of a uniform sample without replacement.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

// Keeps the input order of the chosen items.
template <typename T>
std::vector<T> random_sample(std::span<const T> items, std::size_t n, std::uint64_t seed) {
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(items.size(), n, seed)) out.push_back(items[i]);
  return out;
}

enum class Alternative { kLess, kGreater, kTwoSided };
enum class Method { kExactPermutation, kNormalApproximation };
enum class MethodPolicy { kAuto, kExact, kNormal };

std::string_view to_string(Alternative alternative);
std::optional<Alternative> parse_alternative(std::string_view text);
std::string_view to_string(Method method);

inline constexpr std::size_t kExactLimit = 16;  // |x| + |y|

struct TestResult {
  double u = 0;  // wins of x over y, ties counted half
  double p_value = 1;
  Alternative alternative = Alternative::kTwoSided;
  double rbc = 0;
  double cles = 0.5;
  Method method = Method::kExactPermutation;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  // CLES oriented toward the alternative: P(y > x) for "less", P(x > y)
  // otherwise.
  double directional_cles() const;
};

// Throws ValidationError on an empty sample, or when kExact is forced past
// kExactLimit.
TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                        Alternative alternative, MethodPolicy policy = MethodPolicy::kAuto);

struct CoverageRow {
  std::string category;
  std::string title;
  std::size_t requirements = 0;  // taxonomy size of the category
  std::size_t issues = 0;
  double percentage = 0;
};

struct CoverageTable {
  std::size_t total_issues = 0;
  std::vector<CoverageRow> rows;  // taxonomy category order
};

// Throws ValidationError naming labels absent from the taxonomy.
CoverageTable coverage_by_category(const GoldDataset& gold, const taxonomy::Taxonomy& taxonomy);

struct RankEntry {
  RequirementId id;
  std::size_t count = 0;
};

struct Ranking {
  std::vector<RankEntry> overall;
  std::map<std::string, std::vector<RankEntry>> by_type;  // unknown type keyed ""
};

Ranking top_requirements(const GoldDataset& gold, std::size_t k, bool by_type = false);

}  // namespace privlens::stats

#endif  // PRIVLENS_STATS_HPP_
