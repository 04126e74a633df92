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

#include "privlens/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "privlens/error.hpp"

namespace privlens::stats {

namespace {

constexpr double kTieEpsilon = 1e-9;

double normal_cdf(double z) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

// Midranks (1-based) of the pooled sample, and the tie-group sizes.
std::vector<double> midranks(const std::vector<double>& pooled, std::vector<std::size_t>& ties) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    ties.push_back(j - i);
    i = j;
  }
  return ranks;
}

double exact_p(const std::vector<double>& ranks, std::size_t n1, double u, Alternative alt) {
  const std::size_t n = ranks.size();
  const double offset = static_cast<double>(n1 * (n1 + 1)) / 2.0;
  const double mean = static_cast<double>(n1 * (n - n1)) / 2.0;
  std::size_t hits = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n1) continue;
    double rank_sum = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i)) rank_sum += ranks[i];
    const double perm_u = rank_sum - offset;
    ++total;
    switch (alt) {
      case Alternative::kLess: hits += perm_u <= u + kTieEpsilon; break;
      case Alternative::kGreater: hits += perm_u >= u - kTieEpsilon; break;
      case Alternative::kTwoSided:
        hits += std::abs(perm_u - mean) >= std::abs(u - mean) - kTieEpsilon;
        break;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double normal_p(std::size_t n1, std::size_t n2, const std::vector<std::size_t>& ties, double u,
                Alternative alt) {
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  const double n = a + b;
  double tie_sum = 0;
  for (auto t : ties) {
    const double td = static_cast<double>(t);
    tie_sum += td * td * td - td;
  }
  const double variance = a * b / 12.0 * ((n + 1) - tie_sum / (n * (n - 1)));
  if (variance <= 0) return 1.0;
  const double sd = std::sqrt(variance);
  const double mean = a * b / 2.0;
  switch (alt) {
    case Alternative::kLess: return normal_cdf((u - mean + 0.5) / sd);
    case Alternative::kGreater: return 1.0 - normal_cdf((u - mean - 0.5) / sd);
    case Alternative::kTwoSided: {
      const double z = std::max(0.0, std::abs(u - mean) - 0.5) / sd;
      return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    }
  }
  return 1.0;
}

}  // namespace

std::vector<std::string> SamplingConfig::violations() const {
  std::vector<std::string> out;
  if (!(confidence > 0 && confidence < 1)) out.push_back("confidence must be in (0, 1)");
  if (!(interval > 0)) out.push_back("interval must be positive");
  if (!(proportion > 0 && proportion < 1)) out.push_back("proportion must be in (0, 1)");
  return out;
}

double z_value(double confidence) {
  if (!(confidence > 0 && confidence < 1)) throw ValidationError("confidence must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(),
                               1.0 - (1.0 - confidence) / 2.0);
}

std::size_t sample_size(std::size_t population, const SamplingConfig& config) {
  auto violations = config.violations();
  if (population < 1) violations.push_back("population must be at least 1");
  if (!violations.empty()) throw ValidationError(std::move(violations));
  const double z = z_value(config.confidence);
  const double e = config.interval / 100.0;
  const double ss0 = z * z * config.proportion * (1 - config.proportion) / (e * e);
  const double ss = ss0 / (1 + (ss0 - 1) / static_cast<double>(population));
  const auto rounded = static_cast<std::size_t>(std::floor(ss + 0.5));
  return std::min(rounded, population);
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  if (n > population) {
    throw ValidationError("cannot sample " + std::to_string(n) + " of " +
                          std::to_string(population) + " items");
  }
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  // Selection sampling over a forward range keeps the input order.
  std::sample(all.begin(), all.end(), std::back_inserter(out), n, rng);
  return out;
}

std::string_view to_string(Alternative alternative) {
  switch (alternative) {
    case Alternative::kLess: return "less";
    case Alternative::kGreater: return "greater";
    case Alternative::kTwoSided: return "two-sided";
  }
  return "?";
}

std::optional<Alternative> parse_alternative(std::string_view text) {
  for (auto a : {Alternative::kLess, Alternative::kGreater, Alternative::kTwoSided})
    if (to_string(a) == text) return a;
  return std::nullopt;
}

std::string_view to_string(Method method) {
  return method == Method::kExactPermutation ? "exact-permutation" : "normal-approximation";
}

double TestResult::directional_cles() const {
  return alternative == Alternative::kLess ? 1.0 - cles : cles;
}

TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                        Alternative alternative, MethodPolicy policy) {
  if (x.empty() || y.empty()) throw ValidationError("mann_whitney needs two non-empty samples");
  for (double v : x)
    if (std::isnan(v)) throw ValidationError("sample contains NaN");
  for (double v : y)
    if (std::isnan(v)) throw ValidationError("sample contains NaN");
  const std::size_t n1 = x.size(), n2 = y.size();
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<std::size_t> ties;
  const auto ranks = midranks(pooled, ties);
  double rank_sum = 0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum += ranks[i];

  TestResult r;
  r.n1 = n1;
  r.n2 = n2;
  r.alternative = alternative;
  r.u = rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
  r.cles = r.u / static_cast<double>(n1 * n2);
  r.rbc = 2 * r.cles - 1;

  const bool small = n1 + n2 <= kExactLimit;
  if (policy == MethodPolicy::kExact && !small) {
    throw ValidationError("exact enumeration is limited to " + std::to_string(kExactLimit) +
                          " observations");
  }
  const bool exact = policy == MethodPolicy::kExact || (policy == MethodPolicy::kAuto && small);
  if (exact) {
    r.method = Method::kExactPermutation;
    r.p_value = exact_p(ranks, n1, r.u, alternative);
  } else {
    r.method = Method::kNormalApproximation;
    r.p_value = normal_p(n1, n2, ties, r.u, alternative);
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

CoverageTable coverage_by_category(const GoldDataset& gold, const taxonomy::Taxonomy& taxonomy) {
  std::vector<std::string> dangling;
  for (const auto& e : gold.entries)
    for (const auto& id : e.labels)
      if (!taxonomy.contains(id)) dangling.push_back(e.issue_id + " carries unknown " + id.str());
  if (!dangling.empty()) throw ValidationError(std::move(dangling));

  CoverageTable table;
  table.total_issues = gold.entries.size();
  for (const auto& node : taxonomy.tree().categories()) {
    CoverageRow row{node.id, node.title, taxonomy.category_count(node.id), 0, 0.0};
    for (const auto& e : gold.entries) {
      const bool hit = std::any_of(e.labels.begin(), e.labels.end(), [&](RequirementId id) {
        return taxonomy.at(id).in_category(node.id);
      });
      row.issues += hit;
    }
    if (table.total_issues) {
      row.percentage = 100.0 * static_cast<double>(row.issues) / static_cast<double>(table.total_issues);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::vector<RankEntry> rank(const std::map<RequirementId, std::size_t>& counts, std::size_t k) {
  std::vector<RankEntry> out;
  for (const auto& [id, n] : counts) out.push_back({id, n});
  std::stable_sort(out.begin(), out.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.count > b.count; });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace

Ranking top_requirements(const GoldDataset& gold, std::size_t k, bool by_type) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::map<RequirementId, std::size_t> overall;
  std::map<std::string, std::map<RequirementId, std::size_t>> typed;
  for (const auto& e : gold.entries) {
    for (const auto& id : e.labels) {
      ++overall[id];
      if (by_type) ++typed[e.issue_type.value_or("")][id];
    }
  }
  Ranking ranking;
  ranking.overall = rank(overall, k);
  for (const auto& [type, counts] : typed) ranking.by_type[type] = rank(counts, k);
  return ranking;
}

}  // namespace privlens::stats
