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

#include <random>
#include <sstream>

#include "privlens/error.hpp"
#include "privlens/irr.hpp"
#include "test_support.hpp"

namespace privlens::irr {
namespace {

namespace oracle = privlens::testing::oracle;

LabelSet labels(const std::string& text) { return parse_label_set(text); }

LabelSet to_labels(const oracle::Set& s) {
  LabelSet out;
  for (int x : s) out.insert(RequirementId(static_cast<std::uint32_t>(x)));
  return out;
}

oracle::Set random_set(std::mt19937_64& rng, int universe) {
  oracle::Set s;
  std::uniform_int_distribution<int> coin(0, 2);
  for (int x = 1; x <= universe; ++x)
    if (coin(rng) == 0) s.insert(x);
  return s;
}

TEST(Masi, KnownValues) {
  EXPECT_EQ(masi_distance(labels("R44"), labels("R44")), 0.0);
  EXPECT_EQ(masi_distance(labels("R1,R2"), labels("R3")), 1.0);
  EXPECT_EQ(masi_distance(labels("R44"), labels("R30,R44")), 2.0 / 3.0);
  EXPECT_EQ(masi_distance(labels(""), labels("")), 0.0);
  EXPECT_EQ(masi_distance(labels(""), labels("R1")), 1.0);
  // Overlap without subset: J = 1/3, M = 1/3.
  EXPECT_DOUBLE_EQ(masi_distance(labels("R1,R2"), labels("R2,R3")), 1.0 - 1.0 / 9.0);
}

TEST(Masi, PropertiesOverRandomPairs) {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_set(rng, 6), b = random_set(rng, 6);
    const double ab = masi_distance(a, b), ba = masi_distance(b, a);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(masi_distance(a, a), 0.0);
    EXPECT_EQ(ab == 0.0, a == b);
    EXPECT_NEAR(ab, oracle::masi(a, b), 1e-15);
    EXPECT_EQ(masi_distance(to_labels(a), to_labels(b)), ab);
  }
}

TEST(Masi, NeverBelowJaccardOfSameSets) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_set(rng, 5), b = random_set(rng, 5);
    EXPECT_GE(masi_distance(a, b) + 1e-15, jaccard_distance(a, b));
  }
}

struct Fixture {
  LabeledUnits units;
  std::vector<std::vector<oracle::Set>> plain;
};

Fixture random_fixture(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_units(1, 10), n_coders(2, 4), universe(1, 5), present(0, 4);
  Fixture f;
  const int coders = n_coders(rng), labels_max = universe(rng);
  for (int u = 0, n = n_units(rng); u < n; ++u) {
    Unit unit{"u" + std::to_string(u), {}};
    std::vector<oracle::Set> sets;
    for (int c = 0; c < coders; ++c) {
      if (present(rng) == 0) continue;  // coder skipped this unit
      auto s = random_set(rng, labels_max);
      unit.labelings.push_back({"c" + std::to_string(c), to_labels(s)});
      sets.push_back(s);
    }
    f.units.push_back(std::move(unit));
    f.plain.push_back(std::move(sets));
  }
  return f;
}

TEST(Alpha, MatchesPairwiseOracleOnRandomFixtures) {
  std::mt19937_64 rng(424242);
  const auto masi = distance_function(DistanceKind::kMasi);
  const auto oracle_masi = [](const oracle::Set& a, const oracle::Set& b) { return masi_distance(a, b); };
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const auto f = random_fixture(rng);
    if (!oracle::pairable(f.plain)) {
      EXPECT_THROW(krippendorff_alpha(f.units, masi), ValidationError) << "fixture " << i;
      continue;
    }
    const auto expected = oracle::alpha(f.plain, oracle_masi);
    const auto got = krippendorff_alpha(f.units, masi);
    EXPECT_EQ(got.degenerate, expected.degenerate) << "fixture " << i;
    EXPECT_NEAR(got.value, expected.value, 1e-9) << "fixture " << i;
    compared += !expected.degenerate;
  }
  EXPECT_GT(compared, 150);
}

TEST(Alpha, MatchesOracleForOtherDistances) {
  std::mt19937_64 rng(99);
  for (auto kind : {DistanceKind::kJaccard, DistanceKind::kNominal}) {
    const auto d = distance_function(kind);
    for (int i = 0; i < 50; ++i) {
      const auto f = random_fixture(rng);
      if (!oracle::pairable(f.plain)) {
        EXPECT_THROW(krippendorff_alpha(f.units, d), ValidationError);
        continue;
      }
      const auto expected = oracle::alpha(f.plain, [&](const oracle::Set& a, const oracle::Set& b) {
        return d(to_labels(a), to_labels(b));
      });
      EXPECT_NEAR(krippendorff_alpha(f.units, d).value, expected.value, 1e-9);
    }
  }
}

TEST(Alpha, IdenticalLabelsAreDegenerate) {
  LabeledUnits units;
  for (int u = 0; u < 5; ++u)
    units.push_back({"u" + std::to_string(u), {{"a", labels("R1,R2")}, {"b", labels("R1,R2")}}});
  auto r = krippendorff_alpha(units, distance_function(DistanceKind::kMasi));
  EXPECT_EQ(r.value, 1.0);
  EXPECT_TRUE(r.degenerate);
}

TEST(Alpha, PerfectAgreementIsOne) {
  LabeledUnits units = {{"1", {{"a", labels("R1")}, {"b", labels("R1")}}},
                        {"2", {{"a", labels("R2")}, {"b", labels("R2")}}}};
  auto r = krippendorff_alpha(units, distance_function(DistanceKind::kMasi));
  EXPECT_EQ(r.value, 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Alpha, NominalTwoCoderTextbookCase) {
  // Two coders, four units, values a a / a b / b b / b b.
  LabeledUnits units = {{"1", {{"x", labels("R1")}, {"y", labels("R1")}}},
                        {"2", {{"x", labels("R1")}, {"y", labels("R2")}}},
                        {"3", {{"x", labels("R2")}, {"y", labels("R2")}}},
                        {"4", {{"x", labels("R2")}, {"y", labels("R2")}}}};
  // n = 8, n_a = 3, n_b = 5; D_o = 2/8, D_e = 2*3*5/(8*7).
  const double expected = 1.0 - (2.0 / 8.0) / (30.0 / 56.0);
  EXPECT_NEAR(krippendorff_alpha(units, distance_function(DistanceKind::kNominal)).value, expected, 1e-12);
}

TEST(Alpha, SingleLabelingUnitsAreSkipped) {
  LabeledUnits units = {{"1", {{"a", labels("R1")}, {"b", labels("R2")}}},
                        {"2", {{"a", labels("R1")}}},
                        {"3", {{"a", labels("R2")}, {"b", labels("R2")}}}};
  auto r = krippendorff_alpha(units, distance_function(DistanceKind::kMasi));
  EXPECT_EQ(r.n_units, 2u);
  EXPECT_EQ(r.n_skipped, 1u);
}

TEST(Alpha, PairwiseRestrictsToTwoCoders) {
  LabeledUnits units = {{"1", {{"c1", labels("R1")}, {"c2", labels("R1")}, {"c3", labels("R5")}}},
                        {"2", {{"c1", labels("R2")}, {"c2", labels("R2")}, {"c3", labels("R1")}}},
                        {"3", {{"c1", labels("R3")}, {"c3", labels("R3")}}}};
  const auto d = distance_function(DistanceKind::kMasi);
  auto r12 = pairwise_alpha(units, "c1", "c2", d);
  EXPECT_EQ(r12.value, 1.0);
  EXPECT_EQ(r12.n_units, 2u);
  auto r13 = pairwise_alpha(units, "c1", "c3", d);
  EXPECT_EQ(r13.n_units, 3u);
  EXPECT_LT(r13.value, 1.0);
  EXPECT_THROW(pairwise_alpha(units, "c1", "c1", d), Error);
}

TEST(Alpha, ParseLabeledUnits) {
  std::istringstream in("# comment\n1\tc1\tR44\n1\tc2\tR30,R44\n2\tc1\t\n2\tc1\tR3\n");
  auto units = parse_labeled_units(in);
  ASSERT_EQ(units.size(), 2u);
  EXPECT_EQ(units[0].labelings.size(), 2u);
  ASSERT_EQ(units[1].labelings.size(), 1u);
  EXPECT_EQ(format_label_set(units[1].labelings[0].labels), "R3");
  std::istringstream bad("1\tc1\tR44\n1\tc2\tRX\n");
  try {
    parse_labeled_units(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Bootstrap, SeededAndBracketsThePointEstimate) {
  std::mt19937_64 rng(5);
  Fixture f;
  do f = random_fixture(rng);
  while (f.units.size() < 8);
  const auto d = distance_function(DistanceKind::kMasi);
  auto a = bootstrap_alpha(f.units, d, 500, 0.9, 11);
  auto b = bootstrap_alpha(f.units, d, 500, 0.9, 11);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_LE(a.lower, a.upper);
  EXPECT_EQ(a.iterations, 500u);
  EXPECT_THROW(bootstrap_alpha(f.units, d, 0, 0.9, 1), ValidationError);
  EXPECT_THROW(bootstrap_alpha(f.units, d, 10, 1.5, 1), ValidationError);
}

RatingsMatrix random_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> items(1, 20), raters(2, 6), cats(2, 5);
  RatingsMatrix m;
  m.raters = raters(rng);
  const std::size_t k = cats(rng);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t i = 0, n = items(rng); i < n; ++i) {
    std::vector<std::uint32_t> row(k, 0);
    for (std::size_t r = 0; r < m.raters; ++r) ++row[pick(rng)];
    m.counts.push_back(row);
  }
  return m;
}

TEST(Fleiss, PerfectAgreementIsExactlyOne) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    auto m = random_matrix(rng);
    for (auto& row : m.counts) {
      const auto at = static_cast<std::size_t>(rng() % row.size());
      std::fill(row.begin(), row.end(), 0u);
      row[at] = static_cast<std::uint32_t>(m.raters);
    }
    m.counts.front().assign(m.counts.front().size(), 0u);
    m.counts.front()[0] = static_cast<std::uint32_t>(m.raters);
    m.counts.push_back(std::vector<std::uint32_t>(m.counts.front().size(), 0u));
    m.counts.back()[1] = static_cast<std::uint32_t>(m.raters);
    EXPECT_EQ(fleiss_kappa(m).value, 1.0);
  }
}

TEST(Fleiss, MatchesDirectFormulaOnRandomMatrices) {
  std::mt19937_64 rng(31337);
  int compared = 0;
  while (compared < 50) {
    auto m = random_matrix(rng);
    auto r = fleiss_kappa(m);
    if (r.degenerate) continue;
    EXPECT_NEAR(r.value, oracle::fleiss(m.counts, m.raters), 1e-12);
    ++compared;
  }
}

TEST(Fleiss, SingleCategoryIsDegenerate) {
  RatingsMatrix m{3, {{3, 0}, {3, 0}}};
  auto r = fleiss_kappa(m);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.value, 1.0);
}

TEST(Fleiss, RejectsRowsThatDoNotSumToRaters) {
  RatingsMatrix m{3, {{2, 0}, {3, 0}}};
  EXPECT_FALSE(m.violations().empty());
  EXPECT_THROW(fleiss_kappa(m), ValidationError);
  std::istringstream in("m 3\n1 2\n0 3\n");
  auto parsed = RatingsMatrix::parse(in);
  EXPECT_EQ(parsed.items(), 2u);
  EXPECT_EQ(parsed.categories(), 2u);
  std::istringstream bad("1 2\n");
  EXPECT_THROW(RatingsMatrix::parse(bad), ParseError);
}

}  // namespace
}  // namespace privlens::irr
