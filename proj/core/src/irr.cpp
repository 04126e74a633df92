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

#include "privlens/irr.hpp"

#include <istream>
#include <map>
#include <random>
#include <sstream>

#include "privlens/error.hpp"
#include "text_util.hpp"

namespace privlens::irr {

namespace {

__extension__ typedef __int128 Wide;

ReliabilityResult degenerate_result(Statistic statistic, std::size_t units, std::size_t skipped) {
  return {statistic, 1.0, units, skipped, true};
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<std::string> RatingsMatrix::violations() const {
  std::vector<std::string> out;
  if (raters < 2) out.push_back("m must be at least 2");
  if (counts.empty()) out.push_back("matrix has no items");
  if (!counts.empty() && categories() < 2) out.push_back("matrix needs at least 2 categories");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].size() != categories()) {
      out.push_back("item " + std::to_string(i + 1) + " has " + std::to_string(counts[i].size()) +
                    " categories, expected " + std::to_string(categories()));
      continue;
    }
    std::size_t sum = 0;
    for (auto c : counts[i]) sum += c;
    if (sum != raters) {
      out.push_back("item " + std::to_string(i + 1) + " sums to " + std::to_string(sum) +
                    ", expected " + std::to_string(raters));
    }
  }
  return out;
}

RatingsMatrix RatingsMatrix::parse(std::istream& in) {
  RatingsMatrix m;
  bool header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    if (!header) {
      std::string tag;
      long long raters = -1;
      if (!(fields >> tag >> raters) || tag != "m" || raters < 0 || !(fields >> std::ws).eof()) {
        throw ParseError("expected header 'm <raters>'", lineno);
      }
      m.raters = static_cast<std::size_t>(raters);
      header = true;
      continue;
    }
    std::vector<std::uint32_t> row;
    long long value = 0;
    while (fields >> value) {
      if (value < 0) throw ParseError("negative count", lineno);
      row.push_back(static_cast<std::uint32_t>(value));
    }
    if (!fields.eof()) throw ParseError("non-integer cell", lineno);
    m.counts.push_back(std::move(row));
  }
  if (!header) throw ParseError("missing 'm <raters>' header");
  return m;
}

std::string_view to_string(Statistic statistic) {
  return statistic == Statistic::kFleissKappa ? "fleiss-kappa" : "krippendorff-alpha";
}

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kMasi: return "masi";
    case DistanceKind::kJaccard: return "jaccard";
    case DistanceKind::kNominal: return "nominal";
  }
  return "?";
}

std::optional<DistanceKind> parse_distance(std::string_view text) {
  for (auto k : {DistanceKind::kMasi, DistanceKind::kJaccard, DistanceKind::kNominal})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

Distance distance_function(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::kMasi: return masi_distance<RequirementId>;
    case DistanceKind::kJaccard: return jaccard_distance<RequirementId>;
    case DistanceKind::kNominal: return nominal_distance<LabelSet>;
  }
  return masi_distance<RequirementId>;
}

LabeledUnits parse_labeled_units(std::istream& in) {
  LabeledUnits units;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    auto f = detail::split_fields(line, '\t');
    if (f.size() < 2 || f.size() > 3) throw ParseError("expected unit, coder, labels", lineno);
    const std::string unit(detail::trim(f[0]));
    const std::string coder(detail::trim(f[1]));
    if (unit.empty() || coder.empty()) throw ParseError("empty unit or coder", lineno);
    LabelSet labels;
    try {
      if (f.size() == 3) labels = parse_label_set(f[2]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, "labels");
    }
    auto [it, inserted] = index.emplace(unit, units.size());
    if (inserted) units.push_back({unit, {}});
    auto& labelings = units[it->second].labelings;
    auto same = std::find_if(labelings.begin(), labelings.end(),
                             [&](const Labeling& l) { return l.coder == coder; });
    if (same != labelings.end()) {
      same->labels = std::move(labels);
    } else {
      labelings.push_back({coder, std::move(labels)});
    }
  }
  return units;
}

ReliabilityResult fleiss_kappa(const RatingsMatrix& matrix) {
  auto violations = matrix.violations();
  if (!violations.empty()) throw ValidationError(std::move(violations));
  const auto n_items = static_cast<Wide>(matrix.items());
  const auto m = static_cast<Wide>(matrix.raters);
  std::vector<Wide> column(matrix.categories(), 0);
  Wide squares = 0;
  for (const auto& row : matrix.counts) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      squares += static_cast<Wide>(row[j]) * row[j];
      column[j] += row[j];
    }
  }
  // P-bar = a/b and P-bar-e = c/d, kept as exact integers.
  const Wide a = squares - n_items * m;
  const Wide b = n_items * m * (m - 1);
  Wide c = 0;
  for (Wide col : column) c += col * col;
  const Wide d = (n_items * m) * (n_items * m);
  if (c == d) return degenerate_result(Statistic::kFleissKappa, matrix.items(), 0);
  const Wide num = a * d - c * b;
  const Wide den = b * (d - c);
  const double value = static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
  return {Statistic::kFleissKappa, value, matrix.items(), 0, false};
}

ReliabilityResult krippendorff_alpha(const LabeledUnits& units, const Distance& distance) {
  std::map<LabelSet, std::size_t> value_index;
  std::vector<const LabelSet*> values;
  std::size_t included = 0, skipped = 0;
  for (const auto& unit : units) {
    if (unit.labelings.size() < 2) {
      ++skipped;
      continue;
    }
    ++included;
    for (const auto& l : unit.labelings) {
      auto [it, inserted] = value_index.emplace(l.labels, values.size());
      if (inserted) values.push_back(&it->first);
    }
  }
  if (included == 0) throw ValidationError("no comparable units");

  const std::size_t v = values.size();
  std::vector<double> delta(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) delta[i * v + j] = delta[j * v + i] = distance(*values[i], *values[j]);

  // Coincidence matrix: o[c][k] sums, per unit, ordered pairs of distinct
  // labelings valued (c, k), weighted 1/(m_u - 1).
  std::vector<double> coincidence(v * v, 0.0);
  std::vector<std::size_t> in_unit(v, 0);
  for (const auto& unit : units) {
    const std::size_t m_u = unit.labelings.size();
    if (m_u < 2) continue;
    std::fill(in_unit.begin(), in_unit.end(), 0);
    std::vector<std::size_t> present;
    for (const auto& l : unit.labelings) {
      const std::size_t idx = value_index.at(l.labels);
      if (in_unit[idx]++ == 0) present.push_back(idx);
    }
    const double weight = 1.0 / static_cast<double>(m_u - 1);
    for (std::size_t c : present) {
      for (std::size_t k : present) {
        const double pairs = static_cast<double>(in_unit[c]) *
                             static_cast<double>(in_unit[k] - (c == k ? 1 : 0));
        coincidence[c * v + k] += pairs * weight;
      }
    }
  }
  std::vector<double> marginal(v, 0.0);
  double n = 0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) marginal[c] += coincidence[c * v + k];
    n += marginal[c];
  }
  double observed = 0, expected = 0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) {
      observed += coincidence[c * v + k] * delta[c * v + k];
      expected += marginal[c] * marginal[k] * delta[c * v + k];
    }
  }
  if (expected == 0) return degenerate_result(Statistic::kKrippendorffAlpha, included, skipped);
  return {Statistic::kKrippendorffAlpha, 1.0 - (n - 1) * observed / expected, included, skipped,
          false};
}

ReliabilityResult pairwise_alpha(const LabeledUnits& units, std::string_view coder_a,
                                 std::string_view coder_b, const Distance& distance) {
  LabeledUnits pair_units;
  for (const auto& unit : units) {
    const Labeling* a = nullptr;
    const Labeling* b = nullptr;
    for (const auto& l : unit.labelings) {
      if (l.coder == coder_a) a = &l;
      if (l.coder == coder_b) b = &l;
    }
    if (a && b && a != b) pair_units.push_back({unit.id, {*a, *b}});
  }
  if (pair_units.empty()) {
    throw ValidationError("coders " + std::string(coder_a) + " and " + std::string(coder_b) +
                          " share no unit");
  }
  return krippendorff_alpha(pair_units, distance);
}

ConfidenceInterval bootstrap_alpha(const LabeledUnits& units, const Distance& distance,
                                   std::size_t iterations, double level, std::uint64_t seed) {
  if (iterations == 0) throw ValidationError("bootstrap needs at least one iteration");
  if (!(level > 0 && level < 1)) throw ValidationError("confidence level must be in (0, 1)");
  LabeledUnits comparable;
  for (const auto& u : units)
    if (u.labelings.size() >= 2) comparable.push_back(u);
  if (comparable.empty()) throw ValidationError("no comparable units");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, comparable.size() - 1);
  ConfidenceInterval ci;
  ci.level = level;
  ci.iterations = iterations;
  std::vector<double> replicates;
  replicates.reserve(iterations);
  LabeledUnits resample(comparable.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    for (auto& slot : resample) slot = comparable[pick(rng)];
    auto r = krippendorff_alpha(resample, distance);
    if (r.degenerate) {
      ++ci.degenerate_replicates;
      continue;
    }
    replicates.push_back(r.value);
  }
  if (replicates.empty()) throw ValidationError("every bootstrap replicate was degenerate");
  std::sort(replicates.begin(), replicates.end());
  const double tail = (1 - level) / 2;
  ci.lower = quantile(replicates, tail);
  ci.upper = quantile(replicates, 1 - tail);
  return ci;
}

}  // namespace privlens::irr
