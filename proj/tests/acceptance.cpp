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

// Acceptance suite. Prints one PASS / FAIL / SKIPPED line per criterion and
// exits non-zero on any FAIL. Tolerances are fixed here, not configurable.
//
// The reproduction check reads PRIVLENS_REPLICATION_DIR, laid out as
//   <dir>/<project>/privacy.jsonl      full privacy corpus (canonical)
//   <dir>/<project>/labels.tsv         coder labels, coders c1 c2 c3
//   <dir>/<project>/gold.jsonl         adjudicated gold
//   <dir>/<project>/privacy-sample.jsonl, nonprivacy-sample.jsonl
// for project in {chrome, moodle}.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "privlens/corpus.hpp"
#include "privlens/gold.hpp"
#include "privlens/irr.hpp"
#include "privlens/refinement.hpp"
#include "privlens/stats.hpp"
#include "privlens/taxonomy.hpp"
#include "privlens/workflow.hpp"
#include "test_support.hpp"

namespace {

using namespace privlens;
namespace oracle = privlens::testing::oracle;
using privlens::testing::data_path;

constexpr double kAlphaOracleTolerance = 1e-9;
constexpr double kFleissOracleTolerance = 1e-12;
constexpr double kNormalVsExactTolerance = 0.01;
// Two-sided p is twice the smaller tail, so the tail bound doubles.
constexpr double kNormalVsExactTwoSidedTolerance = 2 * kNormalVsExactTolerance;
constexpr double kReproAlphaTolerance = 0.005;
constexpr double kReproAgreementTolerancePp = 0.05;
constexpr double kReproCoverageTolerancePp = 0.01;
constexpr double kReproEffectTolerance = 0.005;

enum class Status { kPass, kFail, kSkipped };

struct Outcome {
  Status status;
  std::string detail;
};

// Collects failed expectations so one criterion reports all of them.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ += !ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream msg;
    msg.precision(12);
    msg << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, msg.str());
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {Status::kPass, summary + " (" + std::to_string(checks_) + " checks)"};
    std::string d = std::to_string(failed_) + " of " + std::to_string(checks_) + " checks failed";
    for (const auto& f : failures_) d += "; " + f;
    return {Status::kFail, d};
  }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
};

Outcome taxonomy_seed() {
  Checker c;
  const auto t = taxonomy::load_taxonomy_file(data_path("taxonomy.seed"));
  c.expect(t.size() == 71, "71 requirements");
  c.expect(t.tree().categories().size() == 7, "7 categories");
  const std::vector<std::size_t> counts{9, 32, 10, 16, 6, 5, 13};
  std::size_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& id = t.tree().categories()[i].id;
    c.expect(t.category_count(id) == counts[i], id + " count");
    total += t.category_count(id);
  }
  for (const auto& r : t.requirements()) c.expect(!r.refs.empty(), r.id.str() + " has refs");
  c.expect(total == 91, "memberships sum to 91");
  c.expect(taxonomy::validate(t).empty(), "validator clean");
  return c.outcome("71 requirements, 9/32/10/16/6/5/13, 91 memberships");
}

refine::CodedStatement coded(const std::string& ref, taxonomy::ActionVerb verb, const std::string& party,
                             const std::string& target, const std::string& goal, refine::IntentClass intent) {
  refine::CodedStatement s;
  s.source_ref = taxonomy::RegulationRef::parse(ref);
  s.raw_quote = ref;
  s.is_requirement = true;
  s.action = verb;
  s.parties = {party};
  s.target = target;
  s.goal_key = goal;
  s.intent = intent;
  return s;
}

Outcome refinement_golden() {
  using taxonomy::ActionVerb;
  using refine::IntentClass;
  Checker c;
  const std::vector<refine::CodedStatement> withdraw = {
      coded("GDPR:13(2)(c)", ActionVerb::kProvide, "the data subjects",
            "the existence of the right to withdraw consent", "withdraw-consent", IntentClass::kRights),
      coded("ISO29100:5.2", ActionVerb::kAllow, "the PII principals", "to withdraw consent", "withdraw-consent",
            IntentClass::kRights),
      coded("ThailandPDPA:19-5", ActionVerb::kAllow, "the data subjects", "to withdraw consent",
            "withdraw-consent", IntentClass::kRights)};
  const auto w = refine::run_refinement(withdraw);
  c.expect(w.merged.size() == 1 && w.merged[0].text() == "ALLOW the data subjects to withdraw consent",
           "withdraw-consent merge text");
  const std::vector<refine::CodedStatement> dup = {
      coded("GDPR:14(b)", ActionVerb::kProvide, "the data subjects", "the categories of personal data concerned",
            "categories-concerned", IntentClass::kGiveInfo),
      coded("GDPR:15(b)", ActionVerb::kProvide, "the data subjects", "the categories of personal data concerned",
            "categories-concerned", IntentClass::kGiveInfo)};
  const auto d = refine::run_refinement(dup);
  c.expect(d.merged.size() == 1 && d.merged[0].provenance.size() == 2, "14(b)/15(b) collapse with provenance 2");
  const auto shipped = refine::run_refinement(refine::load_coded_statements(data_path("coded_statements.tsv")));
  c.expect(shipped.audit.total_identified() == 249, "249 identified");
  c.expect(shipped.audit.merged_away == 178, "178 merged away");
  c.expect(shipped.audit.final_count == 71, "71 final");
  return c.outcome("golden merges; audit 249 / 178 / 71");
}

oracle::Set random_set(std::mt19937_64& rng, int universe) {
  oracle::Set s;
  for (int x = 1; x <= universe; ++x)
    if (rng() % 3 == 0) s.insert(x);
  return s;
}

Outcome masi() {
  Checker c;
  const auto l = [](const char* t) { return parse_label_set(t); };
  c.expect(irr::masi_distance(l("R44"), l("R44")) == 0.0, "d(A,A) = 0");
  c.expect(irr::masi_distance(l("R1,R2"), l("R3,R4")) == 1.0, "disjoint = 1");
  c.expect(irr::masi_distance(l("R44"), l("R30,R44")) == 2.0 / 3.0, "{R44} vs {R30,R44} = 2/3 exactly");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_set(rng, 6), b = random_set(rng, 6);
    const double ab = irr::masi_distance(a, b);
    c.expect(ab == irr::masi_distance(b, a), "symmetry");
    c.expect(ab >= 0.0 && ab <= 1.0, "bounds");
  }
  return c.outcome("unit values and 1000 random pairs");
}

Outcome alpha_oracle() {
  Checker c;
  std::mt19937_64 rng(2);
  const auto d = irr::distance_function(irr::DistanceKind::kMasi);
  for (int f = 0; f < 200; ++f) {
    irr::LabeledUnits units;
    std::vector<std::vector<oracle::Set>> plain;
    const int coders = 2 + static_cast<int>(rng() % 3), universe = 1 + static_cast<int>(rng() % 5);
    for (int u = 0, n = 1 + static_cast<int>(rng() % 10); u < n; ++u) {
      irr::Unit unit{std::to_string(u), {}};
      std::vector<oracle::Set> sets;
      for (int k = 0; k < coders; ++k) {
        if (rng() % 5 == 0) continue;
        auto s = random_set(rng, universe);
        LabelSet ls;
        for (int x : s) ls.insert(RequirementId(static_cast<std::uint32_t>(x)));
        unit.labelings.push_back({"c" + std::to_string(k), ls});
        sets.push_back(s);
      }
      units.push_back(unit);
      plain.push_back(sets);
    }
    if (!oracle::pairable(plain)) {
      bool threw = false;
      try {
        irr::krippendorff_alpha(units, d);
      } catch (const ValidationError&) {
        threw = true;
      }
      c.expect(threw, "no pairable units rejected, fixture " + std::to_string(f));
      continue;
    }
    const auto want = oracle::alpha(plain, [](const oracle::Set& a, const oracle::Set& b) {
      return irr::masi_distance(a, b);
    });
    const auto got = irr::krippendorff_alpha(units, d);
    c.near(got.value, want.value, kAlphaOracleTolerance, "fixture " + std::to_string(f));
    c.expect(got.degenerate == want.degenerate, "degenerate flag, fixture " + std::to_string(f));
  }
  irr::LabeledUnits same;
  for (int u = 0; u < 4; ++u) same.push_back({std::to_string(u), {{"a", parse_label_set("R1")}, {"b", parse_label_set("R1")}}});
  const auto r = irr::krippendorff_alpha(same, d);
  c.expect(r.value == 1.0 && r.degenerate, "all-identical input gives 1 with flag");
  return c.outcome("200 random fixtures within 1e-9");
}

Outcome fleiss() {
  Checker c;
  std::mt19937_64 rng(3);
  const irr::RatingsMatrix perfect{4, {{4, 0, 0}, {0, 4, 0}, {0, 0, 4}, {4, 0, 0}}};
  c.expect(irr::fleiss_kappa(perfect).value == 1.0, "perfect agreement = 1.0 exactly");
  int compared = 0;
  while (compared < 50) {
    irr::RatingsMatrix m;
    m.raters = 2 + rng() % 5;
    const std::size_t k = 2 + rng() % 4;
    for (std::size_t i = 0, n = 1 + rng() % 20; i < n; ++i) {
      std::vector<std::uint32_t> row(k, 0);
      for (std::size_t r = 0; r < m.raters; ++r) ++row[rng() % k];
      m.counts.push_back(row);
    }
    const auto got = irr::fleiss_kappa(m);
    if (got.degenerate) continue;
    c.near(got.value, oracle::fleiss(m.counts, m.raters), kFleissOracleTolerance,
           "matrix " + std::to_string(compared));
    ++compared;
  }
  return c.outcome("perfect = 1; 50 random matrices within 1e-12");
}

Outcome sampling() {
  Checker c;
  c.expect(stats::sample_size(896) == 269, "sample_size(896) = 269");
  c.expect(stats::sample_size(478) == 213, "sample_size(478) = 213");
  return c.outcome("896 -> 269, 478 -> 213");
}

Outcome mann_whitney() {
  using stats::Alternative;
  using stats::MethodPolicy;
  Checker c;
  const std::vector<double> x{1, 2}, y{3, 4};
  c.near(stats::mann_whitney(x, y, Alternative::kLess).p_value, 1.0 / 6.0, 1e-15, "x=[1,2], y=[3,4], less");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> a(1 + rng() % 25), b(1 + rng() % 25);
    for (auto& v : a) v = static_cast<double>(rng() % 15);
    for (auto& v : b) v = static_cast<double>(rng() % 15);
    const auto ab = stats::mann_whitney(a, b, Alternative::kLess);
    const auto ba = stats::mann_whitney(b, a, Alternative::kGreater);
    c.near(ab.p_value, ba.p_value, 1e-12, "antisymmetric p");
    c.near(ab.cles + ba.cles, 1.0, 1e-12, "antisymmetric cles");
  }
  for (int i = 0; i < 50; ++i) {
    std::vector<double> pool(16);
    std::iota(pool.begin(), pool.end(), 1.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::vector<double> a(pool.begin(), pool.begin() + 8), b(pool.begin() + 8, pool.end());
    for (auto alt : {Alternative::kLess, Alternative::kGreater, Alternative::kTwoSided}) {
      c.near(stats::mann_whitney(a, b, alt, MethodPolicy::kNormal).p_value,
             stats::mann_whitney(a, b, alt, MethodPolicy::kExact).p_value,
             alt == Alternative::kTwoSided ? kNormalVsExactTwoSidedTolerance : kNormalVsExactTolerance,
             "normal vs exact 8+8");
    }
  }
  const std::vector<double> same{2, 7, 1, 8, 2, 8};
  const auto s = stats::mann_whitney(same, same, Alternative::kTwoSided);
  c.expect(s.cles == 0.5 && s.rbc == 0.0, "identical samples: cles 0.5, rbc 0");
  return c.outcome("exact 1/6, antisymmetry x100, normal~exact, identity");
}

struct ProjectTargets {
  std::string name;
  double alpha12, alpha13, agreement_pct;
  std::vector<double> coverage_pct;
  stats::Alternative alternative;
  double effect_days, effect_comments;
  // min, max, mean, median, mode for contributors, resolution days, comments.
  std::array<std::array<std::int64_t, 5>, 3> table;
};

std::int64_t round_half_up(double v) { return static_cast<std::int64_t>(std::floor(v + 0.5)); }

std::vector<double> metric(const std::vector<corpus::IssueReport>& issues, bool days) {
  std::vector<double> out;
  for (const auto& i : issues) {
    if (!days) out.push_back(i.comments);
    else if (auto d = i.resolution_days()) out.push_back(static_cast<double>(*d));
  }
  return out;
}

Outcome reproduction() {
  const char* env = std::getenv("PRIVLENS_REPLICATION_DIR");
  if (!env || !*env) return {Status::kSkipped, "replication dataset not available (set PRIVLENS_REPLICATION_DIR)"};
  const std::filesystem::path root(env);
  const std::vector<ProjectTargets> targets = {
      {"chrome", 0.509, 0.482, 53.01, {35.83, 30.36, 28.01, 13.06, 0.00, 0.11, 17.86},
       stats::Alternative::kLess, 0.578, 0.691,
       {{{1, 32, 5, 4, 2}, {1, 3635, 315, 65, 1}, {0, 311, 16, 12, 12}}}},
      {"moodle", 0.448, 0.468, 46.23, {68.62, 47.91, 40.59, 11.51, 0.00, 1.88, 44.77},
       stats::Alternative::kGreater, 0.609, 0.604,
       {{{1, 14, 4, 5, 5}, {1, 852, 37, 13, 1}, {0, 112, 11, 9, 1}}}},
  };
  std::vector<std::string> missing;
  for (const auto& t : targets)
    for (const char* f : {"privacy.jsonl", "labels.tsv", "gold.jsonl", "privacy-sample.jsonl", "nonprivacy-sample.jsonl"})
      if (!std::filesystem::exists(root / t.name / f)) missing.push_back(t.name + "/" + f);
  if (!missing.empty()) return {Status::kSkipped, "replication dataset incomplete, missing " + missing.front()};

  Checker c;
  const auto tax = taxonomy::load_taxonomy_file(data_path("taxonomy.seed"));
  const auto masi = irr::distance_function(irr::DistanceKind::kMasi);
  for (const auto& t : targets) {
    const auto dir = root / t.name;
    std::ifstream in(dir / "labels.tsv");
    const auto units = irr::parse_labeled_units(in);
    c.near(irr::pairwise_alpha(units, "c1", "c2", masi).value, t.alpha12, kReproAlphaTolerance, t.name + " alpha c1-c2");
    c.near(irr::pairwise_alpha(units, "c1", "c3", masi).value, t.alpha13, kReproAlphaTolerance, t.name + " alpha c1-c3");
    std::size_t all = 0, agreed = 0;
    for (const auto& u : units) {
      if (u.labelings.size() < 2) continue;
      ++all;
      bool same = true;
      for (const auto& l : u.labelings) same = same && l.labels == u.labelings.front().labels;
      agreed += same;
    }
    c.near(all ? 100.0 * static_cast<double>(agreed) / static_cast<double>(all) : 0.0, t.agreement_pct,
           kReproAgreementTolerancePp, t.name + " total agreement %");

    const auto coverage = stats::coverage_by_category(load_gold_file(dir / "gold.jsonl"), tax);
    for (std::size_t i = 0; i < coverage.rows.size() && i < t.coverage_pct.size(); ++i)
      c.near(coverage.rows[i].percentage, t.coverage_pct[i], kReproCoverageTolerancePp,
             t.name + " coverage " + coverage.rows[i].category);

    const auto issues = corpus::load_corpus_file(dir / "privacy.jsonl");
    const auto ds = corpus::descriptive_stats(issues);
    const corpus::MetricStats* rows[3] = {&ds.contributors, ds.resolution_days ? &*ds.resolution_days : nullptr,
                                          &ds.comments};
    for (std::size_t r = 0; r < 3; ++r) {
      c.expect(rows[r] != nullptr, t.name + " metric present");
      if (!rows[r]) continue;
      const std::array<std::int64_t, 5> got{rows[r]->min, rows[r]->max, rows[r]->mean_rounded(),
                                            round_half_up(rows[r]->median), rows[r]->mode};
      c.expect(got == t.table[r], t.name + " descriptive row " + std::to_string(r));
    }

    const auto privacy = corpus::load_corpus_file(dir / "privacy-sample.jsonl");
    const auto baseline = corpus::load_corpus_file(dir / "nonprivacy-sample.jsonl");
    const auto days = stats::mann_whitney(metric(baseline, true), metric(privacy, true), t.alternative);
    const auto comments = stats::mann_whitney(metric(baseline, false), metric(privacy, false), t.alternative);
    c.expect(days.p_value < 0.001, t.name + " resolution-time p < 0.001");
    c.expect(comments.p_value < 0.001, t.name + " comments p < 0.001");
    c.near(days.directional_cles(), t.effect_days, kReproEffectTolerance, t.name + " resolution-time effect");
    c.near(comments.directional_cles(), t.effect_comments, kReproEffectTolerance, t.name + " comments effect");
  }
  return c.outcome("alpha, agreement, coverage, descriptive stats and rank-sum tests");
}

Outcome journal_replay() {
  Checker c;
  privlens::testing::TempDir dir("acceptance");
  const auto tax = std::make_shared<const taxonomy::Taxonomy>(taxonomy::load_taxonomy_file(data_path("taxonomy.seed")));
  auto clock = [n = std::make_shared<int>(0)] { return "2026-01-01T00:00:" + std::to_string(10 + (*n)++ % 50) + "Z"; };
  std::string before;
  {
    workflow::WorkflowStore store(tax, dir / "journal.jsonl", clock);
    workflow::SessionSpec spec;
    spec.id = "s";
    spec.project = "p";
    spec.coders = {"c1", "c2", "c3"};
    for (int i = 1; i <= 11; ++i) spec.issues.push_back("i" + std::to_string(i));
    const auto s = store.create_session(spec);
    for (const auto& issue : s.issues) {
      c.expect(s.assignment.at(issue).size() == 2, "issue " + issue + " has 2 coders");
      for (const auto& coder : s.assignment.at(issue)) {
        const bool odd = issue.back() % 2 && coder != "c1";
        store.submit_labels("s", coder, issue, parse_label_set(odd ? "R30,R44" : "R44"));
      }
    }
    store.start_adjudication("s");
    for (const auto& d : store.disagreements("s").disagreements)
      store.adjudicate("s", d.issue_id, parse_label_set("R30,R44"), std::nullopt, {"c1"}, "");
    before = gold_to_string(store.finalize("s").gold);
  }
  workflow::WorkflowStore replayed(tax, dir / "journal.jsonl", clock);
  c.expect(gold_to_string(replayed.gold("s").gold) == before, "replayed gold is byte-identical");
  return c.outcome("create, assign, label, adjudicate, finalize, replay");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"taxonomy-seed-validation", taxonomy_seed},
      {"refinement-golden", refinement_golden},
      {"masi-distance", masi},
      {"krippendorff-alpha-oracle", alpha_oracle},
      {"fleiss-kappa", fleiss},
      {"sampling", sampling},
      {"mann-whitney", mann_whitney},
      {"conditional-reproduction", reproduction},
      {"workflow-journal-replay", journal_replay},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIPPED";
    failed += o.status == Status::kFail;
    std::cout << tag << ' ' << name << ": " << o.detail << '\n';
  }
  return failed ? 1 : 0;
}
