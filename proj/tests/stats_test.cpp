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


#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "privlens/error.hpp"
#include "privlens/stats.hpp"
#include "privlens/taxonomy.hpp"
#include "test_support.hpp"

namespace privlens::stats {
namespace {

namespace oracle = privlens::testing::oracle;
using privlens::testing::data_path;

TEST(Sampling, ReferenceCorpusSizes) {
  EXPECT_EQ(sample_size(896), 269u);
  EXPECT_EQ(sample_size(478), 213u);
}

TEST(Sampling, ZForNinetyFivePercent) {
  EXPECT_NEAR(z_value(0.95), 1.959964, 1e-6);
  EXPECT_NEAR(z_value(0.99), 2.575829, 1e-6);
  EXPECT_THROW(z_value(1.0), ValidationError);
}

TEST(Sampling, MonotoneAndCappedByPopulation) {
  std::size_t previous = 0;
  for (std::size_t n = 1; n <= 5000; ++n) {
    const std::size_t s = sample_size(n);
    EXPECT_LE(s, n);
    EXPECT_GE(s, previous) << n;
    previous = s;
  }
  // Without correction the size tends to z^2/4e^2 = 384.1.
  EXPECT_EQ(sample_size(100000000), 384u);
  EXPECT_EQ(sample_size(1), 1u);
}

TEST(Sampling, TighterSettingsNeedMoreSamples) {
  SamplingConfig loose, tight;
  tight.confidence = 0.99;
  EXPECT_GT(sample_size(896, tight), sample_size(896, loose));
  tight = {};
  tight.interval = 3;
  EXPECT_GT(sample_size(896, tight), sample_size(896, loose));
  SamplingConfig skewed;
  skewed.proportion = 0.1;
  EXPECT_LT(sample_size(896, skewed), sample_size(896, loose));
  SamplingConfig bad;
  bad.interval = 0;
  EXPECT_THROW(sample_size(10, bad), ValidationError);
  EXPECT_THROW(sample_size(0), ValidationError);
}

TEST(Sampling, SeededIndicesAreSortedDistinctAndReproducible) {
  auto a = sample_indices(896, 269, 2021);
  auto b = sample_indices(896, 269, 2021);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 269u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_LT(a.back(), 896u);
  EXPECT_NE(sample_indices(896, 269, 2022), a);
  EXPECT_THROW(sample_indices(3, 4, 1), ValidationError);
  std::vector<int> items{10, 20, 30, 40};
  auto picked = random_sample<int>(items, 4, 1);
  EXPECT_EQ(picked, items);
}

TEST(MannWhitney, SmallestExactCase) {
  const std::vector<double> x{1, 2}, y{3, 4};
  auto r = mann_whitney(x, y, Alternative::kLess);
  EXPECT_EQ(r.method, Method::kExactPermutation);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 6.0);
  EXPECT_EQ(r.cles, 0.0);
  EXPECT_EQ(r.rbc, -1.0);
  EXPECT_EQ(r.directional_cles(), 1.0);
  EXPECT_DOUBLE_EQ(mann_whitney(x, y, Alternative::kTwoSided).p_value, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(mann_whitney(x, y, Alternative::kGreater).p_value, 1.0);
}

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, int spread) {
  std::uniform_int_distribution<int> d(0, spread);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

TEST(MannWhitney, ExactMatchesEnumerationOracle) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::size_t> size(1, 7);
  for (int i = 0; i < 150; ++i) {
    const auto x = draw(rng, size(rng), 6), y = draw(rng, size(rng), 6);
    const auto o = oracle::exact_mann_whitney(x, y);
    EXPECT_EQ(mann_whitney(x, y, Alternative::kLess, MethodPolicy::kExact).u, o.u);
    EXPECT_NEAR(mann_whitney(x, y, Alternative::kLess, MethodPolicy::kExact).p_value, o.p_less, 1e-12);
    EXPECT_NEAR(mann_whitney(x, y, Alternative::kGreater, MethodPolicy::kExact).p_value, o.p_greater, 1e-12);
    EXPECT_NEAR(mann_whitney(x, y, Alternative::kTwoSided, MethodPolicy::kExact).p_value, o.p_two_sided,
                1e-12);
  }
}

TEST(MannWhitney, AntisymmetryOnRandomPairs) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  for (int i = 0; i < 100; ++i) {
    const auto x = draw(rng, size(rng), 20), y = draw(rng, size(rng), 20);
    for (auto policy : {MethodPolicy::kAuto, MethodPolicy::kNormal}) {
      auto xy = mann_whitney(x, y, Alternative::kLess, policy);
      auto yx = mann_whitney(y, x, Alternative::kGreater, policy);
      EXPECT_NEAR(xy.p_value, yx.p_value, 1e-12);
      EXPECT_DOUBLE_EQ(xy.u + yx.u, static_cast<double>(x.size() * y.size()));
      EXPECT_NEAR(xy.cles + yx.cles, 1.0, 1e-12);
      EXPECT_NEAR(xy.rbc, -yx.rbc, 1e-12);
      auto two_xy = mann_whitney(x, y, Alternative::kTwoSided, policy);
      auto two_yx = mann_whitney(y, x, Alternative::kTwoSided, policy);
      EXPECT_NEAR(two_xy.p_value, two_yx.p_value, 1e-12);
      EXPECT_GE(two_xy.p_value, 0.0);
      EXPECT_LE(two_xy.p_value, 1.0);
    }
  }
}

TEST(MannWhitney, NormalApproximationTracksExactWithoutTies) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> pool(16);
    std::iota(pool.begin(), pool.end(), 1.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<double> x(pool.begin(), pool.begin() + 8), y(pool.begin() + 8, pool.end());
    for (auto alt : {Alternative::kLess, Alternative::kGreater, Alternative::kTwoSided}) {
      const double exact = mann_whitney(x, y, alt, MethodPolicy::kExact).p_value;
      const double normal = mann_whitney(x, y, alt, MethodPolicy::kNormal).p_value;
      // Two-sided p doubles a tail, so its gap is twice the one-sided one
      // (worst case over all 8+8 outcomes: 0.0055 one-sided, 0.0109 two-sided).
      const double tol = alt == Alternative::kTwoSided ? 0.02 : 0.01;
      EXPECT_NEAR(exact, normal, tol) << "round " << i << " " << to_string(alt);
    }
  }
}

TEST(MannWhitney, IdenticalSamplesHaveNoEffect) {
  const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
  for (auto policy : {MethodPolicy::kExact, MethodPolicy::kNormal}) {
    auto r = mann_whitney(x, x, Alternative::kTwoSided, policy);
    EXPECT_EQ(r.cles, 0.5);
    EXPECT_EQ(r.rbc, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
  }
}

TEST(MannWhitney, AutoSwitchesToNormalForLargeSamples) {
  std::vector<double> x(20), y(20);
  std::iota(x.begin(), x.end(), 0.0);
  std::iota(y.begin(), y.end(), 10.0);
  auto r = mann_whitney(x, y, Alternative::kLess);
  EXPECT_EQ(r.method, Method::kNormalApproximation);
  EXPECT_LT(r.p_value, 0.01);
  EXPECT_THROW(mann_whitney(std::vector<double>{}, y, Alternative::kLess), ValidationError);
  EXPECT_THROW(mann_whitney(x, y, Alternative::kLess, MethodPolicy::kExact), ValidationError);
}

GoldDataset gold_of(const std::vector<std::pair<std::string, std::string>>& rows) {
  GoldDataset g;
  for (const auto& [id, labels] : rows) {
    GoldEntry e;
    e.project = "demo";
    e.issue_id = id;
    e.labels = parse_label_set(labels);
    e.issue_type = id.back() % 2 ? "bug" : "feature";
    g.entries.push_back(e);
  }
  return g;
}

const taxonomy::Taxonomy& seed() {
  static const auto t = taxonomy::load_taxonomy_file(data_path("taxonomy.seed"));
  return t;
}

TEST(Coverage, CountsIssuesNotLabels) {
  // R1 and R3 are both user participation; R6 is in two categories.
  auto table = coverage_by_category(gold_of({{"1", "R1,R3"}, {"2", "R6"}, {"3", ""}, {"4", "R44"}}), seed());
  EXPECT_EQ(table.total_issues, 4u);
  ASSERT_EQ(table.rows.size(), 7u);
  EXPECT_EQ(table.rows[0].category, "user-participation");
  EXPECT_EQ(table.rows[0].title, "User participation");
  EXPECT_EQ(table.rows[0].requirements, 9u);
  EXPECT_EQ(table.rows[0].issues, 3u);
  EXPECT_DOUBLE_EQ(table.rows[0].percentage, 75.0);
}

TEST(Coverage, MatchesDirectCountAndIgnoresOrder) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> req(1, 71), count(0, 4);
  std::vector<std::pair<std::string, std::string>> rows;
  for (int i = 0; i < 120; ++i) {
    LabelSet s;
    for (int j = count(rng); j > 0; --j) s.insert(RequirementId(static_cast<std::uint32_t>(req(rng))));
    rows.emplace_back(std::to_string(i), format_label_set(s));
  }
  auto gold = gold_of(rows);
  auto table = coverage_by_category(gold, seed());
  for (const auto& row : table.rows) {
    std::size_t n = 0;
    for (const auto& e : gold.entries)
      n += std::any_of(e.labels.begin(), e.labels.end(),
                       [&](RequirementId id) { return seed().at(id).in_category(row.category); });
    EXPECT_EQ(row.issues, n) << row.category;
    EXPECT_NEAR(row.percentage, 100.0 * static_cast<double>(n) / 120.0, 1e-12);
  }
  std::shuffle(gold.entries.begin(), gold.entries.end(), rng);
  auto again = coverage_by_category(gold, seed());
  for (std::size_t i = 0; i < table.rows.size(); ++i) EXPECT_EQ(again.rows[i].issues, table.rows[i].issues);
}

TEST(Coverage, UnknownLabelIsRejected) {
  EXPECT_THROW(coverage_by_category(gold_of({{"1", "R99"}}), seed()), Error);
}

TEST(Ranking, OrdersByCountThenId) {
  auto gold = gold_of({{"1", "R44,R30"}, {"2", "R44"}, {"3", "R30,R1"}, {"4", "R44,R2"}, {"5", "R2"}});
  auto r = top_requirements(gold, 3, true);
  ASSERT_EQ(r.overall.size(), 3u);
  EXPECT_EQ(r.overall[0].id.str(), "R44");
  EXPECT_EQ(r.overall[0].count, 3u);
  EXPECT_EQ(r.overall[1].id.str(), "R2");
  EXPECT_EQ(r.overall[2].id.str(), "R30");
  ASSERT_TRUE(r.by_type.contains("bug"));
  EXPECT_EQ(r.by_type.at("bug")[0].id.str(), "R30");
  EXPECT_TRUE(top_requirements(gold, 3, false).by_type.empty());
  EXPECT_EQ(top_requirements(gold, 100).overall.size(), 4u);  // R1 R2 R30 R44
}

}  // namespace
}  // namespace privlens::stats
