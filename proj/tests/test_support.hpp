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

// Test helpers and independent reference implementations. The oracles here
// share no code with the library: they enumerate pairs and permutations
// directly instead of building coincidence matrices or rank sums.

#ifndef PRIVLENS_TESTS_TEST_SUPPORT_HPP_
#define PRIVLENS_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace privlens::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PRIVLENS_TEST_DATA_DIR) / name;
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(PRIVLENS_TEST_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("privlens-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

namespace oracle {

using Set = std::set<int>;

// MASI from its definition: J * M with J the Jaccard index and M the
// monotonicity weight (1, 2/3, 1/3, 0).
inline double masi(const Set& a, const Set& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (int x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  double m = 0;
  if (a == b) m = 1;
  else if (inter == a.size() || inter == b.size()) m = 2.0 / 3.0;
  else if (inter > 0) m = 1.0 / 3.0;
  return 1.0 - (static_cast<double>(inter) / static_cast<double>(uni)) * m;
}

struct AlphaResult {
  double value = 0;
  bool degenerate = false;
};

inline bool pairable(const std::vector<std::vector<Set>>& units) {
  for (const auto& u : units)
    if (u.size() >= 2) return true;
  return false;
}

// Krippendorff's alpha by brute force over value instances. Each unit lists
// the label sets its coders gave; units with one set are not pairable.
//   D_o = 1/n * sum_u 1/(m_u - 1) * sum_{i != j in u} d(v_i, v_j)
//   D_e = 1/(n(n-1)) * sum_{i != j over all pairable instances} d(v_i, v_j)
inline AlphaResult alpha(const std::vector<std::vector<Set>>& units,
                         const std::function<double(const Set&, const Set&)>& d) {
  std::vector<Set> pool;
  long double observed = 0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    long double within = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        if (i != j) within += d(u[i], u[j]);
    observed += within / static_cast<long double>(u.size() - 1);
    pool.insert(pool.end(), u.begin(), u.end());
  }
  const long double n = static_cast<long double>(pool.size());
  long double expected = 0;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (i != j) expected += d(pool[i], pool[j]);
  if (pool.size() < 2 || expected == 0) return {1.0, true};
  const long double d_o = observed / n;
  const long double d_e = expected / (n * (n - 1));
  return {static_cast<double>(1 - d_o / d_e), false};
}

// Fleiss' kappa from the textbook per-item agreement formula.
inline double fleiss(const std::vector<std::vector<std::uint32_t>>& counts, std::size_t m) {
  const std::size_t n_items = counts.size();
  const std::size_t k = counts.front().size();
  long double p_bar = 0;
  std::vector<long double> p(k, 0);
  for (const auto& row : counts) {
    long double agree = 0;
    for (std::size_t j = 0; j < k; ++j) {
      agree += static_cast<long double>(row[j]) * (row[j] - 1.0L);
      p[j] += row[j];
    }
    p_bar += agree / (static_cast<long double>(m) * (m - 1.0L));
  }
  p_bar /= n_items;
  long double p_e = 0;
  for (auto& pj : p) {
    pj /= static_cast<long double>(n_items * m);
    p_e += pj * pj;
  }
  return static_cast<double>((p_bar - p_e) / (1 - p_e));
}

struct RankSumResult {
  double u = 0;
  double p_less = 0;
  double p_greater = 0;
  double p_two_sided = 0;
};

// Exact Mann-Whitney by visiting every split of the pooled sample into
// groups of |x| and |y|. U counts x-over-y wins, ties half.
inline RankSumResult exact_mann_whitney(const std::vector<double>& x, const std::vector<double>& y) {
  auto u_of = [](const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (double ai : a)
      for (double bj : b) u += ai > bj ? 1.0 : (ai == bj ? 0.5 : 0.0);
    return u;
  };
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const double observed = u_of(x, y);
  const double center = static_cast<double>(x.size() * y.size()) / 2.0;
  std::vector<bool> pick(pooled.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(x.size()), true);
  std::sort(pick.begin(), pick.end());
  std::size_t total = 0, le = 0, ge = 0, extreme = 0;
  do {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < pooled.size(); ++i) (pick[i] ? a : b).push_back(pooled[i]);
    const double u = u_of(a, b);
    ++total;
    if (u <= observed + 1e-9) ++le;
    if (u >= observed - 1e-9) ++ge;
    if (std::abs(u - center) >= std::abs(observed - center) - 1e-9) ++extreme;
  } while (std::next_permutation(pick.begin(), pick.end()));
  const double t = static_cast<double>(total);
  return {observed, le / t, ge / t, std::min(1.0, extreme / t)};
}

}  // namespace oracle
}  // namespace privlens::testing

#endif  // PRIVLENS_TESTS_TEST_SUPPORT_HPP_
