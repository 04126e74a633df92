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

// privlens command-line tool.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"
#include "privlens/gold.hpp"
#include "privlens/irr.hpp"
#include "privlens/json_io.hpp"
#include "privlens/refinement.hpp"
#include "privlens/report.hpp"
#include "privlens/service.hpp"
#include "privlens/stats.hpp"
#include "privlens/taxonomy.hpp"
#include "privlens/workflow.hpp"

namespace fs = std::filesystem;
using namespace privlens;
using nlohmann::json;

namespace {

// Seed and trace shipped with the library: env override, then the
// installed copy, then the source tree.
fs::path data_file(const char* name) {
  if (const char* dir = std::getenv("PRIVLENS_DATA_DIR")) return fs::path(dir) / name;
  const fs::path installed = fs::path(PRIVLENS_INSTALLED_DATA_DIR) / name;
  if (fs::exists(installed)) return installed;
  return fs::path(PRIVLENS_DEFAULT_DATA_DIR) / name;
}

std::string env_or(const char* var, const std::string& fallback) {
  const char* v = std::getenv(var);
  return v && *v ? v : fallback;
}

std::string default_taxonomy() {
  return env_or(service::kEnvTaxonomy, data_file("taxonomy.seed").string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

std::vector<double> read_sample(const fs::path& path) {
  std::vector<double> out;
  std::string text = read_file(path);
  for (char& c : text)
    if (c == ',' || c == ';' || c == '\t') c = '\n';
  std::istringstream in(text);
  std::string token;
  std::size_t n = 0;
  while (in >> token) {
    ++n;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      // A non-numeric first token is a header.
      if (n == 1) continue;
      throw ParseError("'" + token + "' is not a number", 0, path.string());
    }
  }
  return out;
}

std::shared_ptr<const taxonomy::Taxonomy> load_tax(const std::string& path) {
  return std::make_shared<const taxonomy::Taxonomy>(taxonomy::load_taxonomy_file(path));
}

std::string fixed(double v, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << v;
  return out.str();
}

std::string describe(const irr::ReliabilityResult& r) {
  std::string out = std::string(irr::to_string(r.statistic)) + " = " + fixed(r.value, 3) + " (" +
                    std::to_string(r.n_units) + " units";
  if (r.n_skipped) out += ", " + std::to_string(r.n_skipped) + " skipped";
  if (r.degenerate) out += ", degenerate";
  return out + ")";
}

struct StoreOptions {
  std::string store = env_or(service::kEnvStore, "privlens.journal");
  std::string taxonomy = default_taxonomy();

  void attach(CLI::App* cmd) {
    cmd->add_option("--store", store, "Workflow journal (env PRIVLENS_STORE)");
    cmd->add_option("--taxonomy", taxonomy, "Taxonomy seed (env PRIVLENS_TAXONOMY)");
  }
  std::unique_ptr<workflow::WorkflowStore> open() const {
    return std::make_unique<workflow::WorkflowStore>(load_tax(taxonomy), store);
  }
};

std::sig_atomic_t volatile g_stop = 0;

void add_taxonomy(CLI::App& app) {
  auto* tax = app.add_subcommand("taxonomy", "Inspect and validate the requirement taxonomy");
  tax->require_subcommand(1);

  static std::string seed = default_taxonomy();
  auto* validate = tax->add_subcommand("validate", "Check the seed against the taxonomy invariants");
  validate->add_option("seed", seed, "Seed file")->capture_default_str();
  validate->callback([] {
    std::ifstream in(seed);
    if (!in) throw IoError("cannot open " + seed);
    auto t = taxonomy::parse_taxonomy(in);
    auto violations = taxonomy::validate(t);
    std::size_t memberships = 0;
    for (const auto& node : t.tree().categories()) {
      const auto n = t.category_count(node.id);
      memberships += n;
      std::cout << node.id << '\t' << n << '\n';
    }
    std::cout << "requirements\t" << t.size() << "\nmemberships\t" << memberships << '\n';
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
      throw ValidationError(violations);
    }
    std::cout << "valid (version " << t.version() << ")\n";
  });

  static std::string rid, issue, labels;
  static bool as_json = false;
  auto* trace = tax->add_subcommand("trace", "Regulation references of a requirement or an issue");
  trace->add_option("requirement", rid, "Requirement id, e.g. R44");
  trace->add_option("--issue", issue, "Issue id for an issue trace");
  trace->add_option("--labels", labels, "Issue labels, e.g. R30,R44");
  trace->add_option("--seed", seed, "Seed file");
  trace->add_flag("--json", as_json, "Machine-readable output");
  trace->callback([] {
    auto t = taxonomy::load_taxonomy_file(seed);
    taxonomy::TraceReport report;
    if (!issue.empty()) {
      report = taxonomy::trace_issue(issue, parse_label_set(labels), t);
    } else {
      if (rid.empty()) throw ValidationError("give a requirement id or --issue with --labels");
      report = taxonomy::trace_issue("", LabelSet{RequirementId::parse(rid)}, t);
    }
    if (as_json) {
      std::cout << json(report).dump(2) << '\n';
      return;
    }
    for (const auto& e : report.entries) {
      std::cout << e.id.str() << "  " << e.text << '\n';
      for (const auto& [source, locs] : e.refs) {
        std::cout << "  " << taxonomy::to_string(source) << ':';
        for (const auto& l : locs) std::cout << ' ' << l;
        std::cout << '\n';
      }
    }
  });

  static std::string category;
  auto* list = tax->add_subcommand("list", "List requirements, optionally by category[/sub]");
  list->add_option("--category", category, "category or category/subcategory");
  list->add_option("--seed", seed, "Seed file");
  list->callback([] {
    auto t = taxonomy::load_taxonomy_file(seed);
    std::vector<taxonomy::Requirement> reqs = t.requirements();
    if (!category.empty()) {
      auto ref = taxonomy::CategoryRef::parse(category);
      reqs = taxonomy::requirements_by_category(t, ref.category, ref.subcategory);
    }
    for (const auto& r : reqs) std::cout << r.id.str() << '\t' << r.text() << '\n';
  });
}

void add_refine(CLI::App& app) {
  auto* refine_cmd = app.add_subcommand("refine", "Merge coded regulation statements");
  refine_cmd->require_subcommand(1);
  static std::string statements = data_file("coded_statements.tsv").string();
  static std::string seed;
  static bool audit_only = false, as_json = false;

  auto* run = refine_cmd->add_subcommand("run", "Group, merge and audit the coded statements");
  run->add_option("statements", statements, "Coded statements TSV")->capture_default_str();
  run->add_flag("--audit", audit_only, "Print only the pipeline audit");
  run->add_flag("--json", as_json, "Machine-readable output");
  run->add_option("--compare", seed, "Compare merged requirements with a taxonomy seed");
  run->callback([] {
    auto s = refine::load_coded_statements(statements);
    auto result = refine::run_refinement(s);
    if (as_json) {
      json out{{"audit", result.audit}};
      if (!audit_only) out["requirements"] = result.merged;
      std::cout << out.dump(2) << '\n';
    } else {
      if (!audit_only) {
        for (const auto& m : result.merged) {
          std::cout << m.text() << (m.needs_review ? "  [review]" : "") << "\n   ";
          for (const auto& r : m.provenance) std::cout << ' ' << r.str();
          std::cout << '\n';
        }
        std::cout << '\n';
      }
      const auto& a = result.audit;
      std::cout << "source\tshortlisted\tidentified\n";
      for (const auto& [src, n] : a.shortlisted) {
        auto id = a.identified.find(src);
        std::cout << taxonomy::to_string(src) << '\t' << n << '\t'
                  << (id == a.identified.end() ? 0 : id->second) << '\n';
      }
      std::cout << "total\t" << a.total_shortlisted() << '\t' << a.total_identified()
                << "\nmerged-away\t" << a.merged_away << "\nfinal\t" << a.final_count << '\n';
    }
    if (!seed.empty()) {
      auto problems = refine::compare_with_taxonomy(result.merged, taxonomy::load_taxonomy_file(seed));
      for (const auto& p : problems) std::cerr << "mismatch: " << p << '\n';
      if (!problems.empty()) throw ValidationError(problems);
      std::cerr << "all merged requirements match the taxonomy\n";
    }
  });

  auto* incons = refine_cmd->add_subcommand("check-inconsistencies",
                                            "Report statements with opposing constraint markers");
  incons->add_option("statements", statements, "Coded statements TSV")->capture_default_str();
  incons->callback([] {
    auto s = refine::load_coded_statements(statements);
    auto found = refine::detect_inconsistencies(s);
    for (const auto& r : found) {
      std::cout << r.first.goal_key << ": " << r.first.source_ref.str() << ' '
                << r.first.polarity->str() << " vs " << r.second.source_ref.str() << ' '
                << r.second.polarity->str() << '\n';
    }
    std::cout << found.size() << " inconsistenc" << (found.size() == 1 ? "y" : "ies") << '\n';
  });
}

void add_ingest(CLI::App& app) {
  static std::string format = "canonical-json", file, output, project;
  auto* cmd = app.add_subcommand("ingest", "Convert a tracker export to the canonical issue format");
  cmd->add_option("--format", format, "monorail-csv, jira-json or canonical-json")->capture_default_str();
  cmd->add_option("file", file, "Export file")->required();
  cmd->add_option("-o,--output", output, "Canonical output (stdout by default)");
  cmd->add_option("--project", project, "Project name when the export has none");
  cmd->callback([] {
    auto f = corpus::parse_format(format);
    if (!f) throw ValidationError("unknown format " + format);
    auto result = corpus::ingest_file(file, *f, {project});
    std::ostringstream out;
    corpus::write_canonical(out, result.issues);
    emit(output, out.str());
    for (const auto& w : result.warnings) std::cerr << "skipped " << w << '\n';
    std::cerr << "ingested " << result.issues.size() << " issues, skipped " << result.skipped << '\n';
  });
}

void add_corpus(CLI::App& app) {
  auto* cmd = app.add_subcommand("corpus", "Filter and describe canonical issue files");
  cmd->require_subcommand(1);
  static std::string file, output, tag = "privacy", statuses, exclude;
  static bool as_json = false;
  static std::size_t min_tokens = corpus::kDefaultMinContentTokens;

  auto* st = cmd->add_subcommand("stats", "Descriptive statistics per metric");
  st->add_option("file", file, "Canonical issue file")->required();
  st->add_flag("--json", as_json, "Machine-readable output");
  st->callback([] {
    auto issues = corpus::load_corpus_file(file);
    auto s = corpus::descriptive_stats(issues);
    if (as_json) {
      std::cout << json(s).dump(2) << '\n';
      return;
    }
    std::cout << "issues\t" << s.issues << "\nmetric\tmin\tmax\tmean\tmedian\tmode\n";
    auto row = [](const char* name, const corpus::MetricStats& m) {
      std::cout << name << '\t' << m.min << '\t' << m.max << '\t' << m.mean_rounded() << '\t'
                << m.median << '\t' << m.mode << '\n';
    };
    row("contributors", s.contributors);
    if (s.resolution_days) row("resolution-days", *s.resolution_days);
    row("comments", s.comments);
  });

  auto* filter = cmd->add_subcommand("filter", "Keep privacy-tagged issues in the allowed statuses");
  filter->add_option("file", file, "Canonical issue file")->required();
  filter->add_option("--tag", tag, "Component tag")->capture_default_str();
  filter->add_option("--status", statuses, "Comma-separated statuses, e.g. assigned,fixed,verified");
  filter->add_option("--exclude", exclude, "File of issue ids to drop, one per line");
  filter->add_option("-o,--output", output, "Output file (stdout by default)");
  filter->callback([] {
    auto issues = corpus::load_corpus_file(file);
    std::set<std::string> allowed;
    std::stringstream ss(statuses);
    for (std::string s; std::getline(ss, s, ',');)
      if (!s.empty()) allowed.insert(s);
    auto kept = corpus::filter_privacy_tagged(issues, allowed, tag);
    if (!exclude.empty()) {
      std::set<std::string> ids;
      std::istringstream in(read_file(exclude));
      for (std::string id; in >> id;) ids.insert(id);
      kept = corpus::apply_exclusions(kept, ids);
    }
    std::ostringstream out;
    corpus::write_canonical(out, kept);
    emit(output, out.str());
    std::cerr << "kept " << kept.size() << " of " << issues.size() << " issues\n";
  });

  auto* flag = cmd->add_subcommand("flag", "List issues whose description carries little text");
  flag->add_option("file", file, "Canonical issue file")->required();
  flag->add_option("--min-tokens", min_tokens, "Content-token threshold")->capture_default_str();
  flag->callback([] {
    auto issues = corpus::load_corpus_file(file);
    std::size_t flagged = 0;
    for (const auto& i : issues) {
      if (corpus::flag_low_information(i, min_tokens)) {
        ++flagged;
        std::cout << i.issue_id << '\t' << corpus::content_tokens(i.description) << '\t' << i.title
                  << '\n';
      }
    }
    std::cerr << flagged << " of " << issues.size() << " issues flagged for review\n";
  });

  static std::size_t n = 0;
  static std::uint64_t seed = 1;
  auto* sample = cmd->add_subcommand("sample", "Seeded uniform sample, original order kept");
  sample->add_option("file", file, "Canonical issue file")->required();
  sample->add_option("-n", n, "Sample size (default: sample_size of the corpus)");
  sample->add_option("--seed", seed, "Random seed")->capture_default_str();
  sample->add_option("-o,--output", output, "Output file (stdout by default)");
  sample->callback([] {
    auto issues = corpus::load_corpus_file(file);
    const std::size_t size = n ? n : stats::sample_size(issues.size());
    auto picked = stats::random_sample<corpus::IssueReport>(issues, size, seed);
    std::ostringstream out;
    corpus::write_canonical(out, picked);
    emit(output, out.str());
    std::cerr << "sampled " << picked.size() << " of " << issues.size() << " issues\n";
  });
}

void add_session(CLI::App& app) {
  auto* cmd = app.add_subcommand("session", "Multi-coder labelling sessions");
  cmd->require_subcommand(1);
  static StoreOptions store;
  static std::string id, project, corpus_file, issues, coders, scheme = "split-half", coder, issue,
      labels, resolution, adjudicators, note, output;
  static std::size_t k = 2;
  static std::optional<std::uint64_t> base_version;
  static bool as_json = false;

  auto* create = cmd->add_subcommand("create", "Create a session and assign coders");
  store.attach(create);
  create->add_option("--id", id, "Session id")->required();
  create->add_option("--project", project, "Project name");
  create->add_option("--corpus", corpus_file, "Canonical issue file supplying the issues");
  create->add_option("--issues", issues, "Comma-separated issue ids instead of --corpus");
  create->add_option("--coders", coders, "Comma-separated coder ids; first coder sees every issue")
      ->required();
  create->add_option("--scheme", scheme, "split-half or k-of-n")->capture_default_str();
  create->add_option("--k", k, "Coders per issue for k-of-n")->capture_default_str();
  create->callback([] {
    workflow::SessionSpec spec;
    spec.id = id;
    spec.project = project;
    spec.corpus_ref = corpus_file;
    std::stringstream cs(coders);
    for (std::string c; std::getline(cs, c, ',');)
      if (!c.empty()) spec.coders.push_back(c);
    if (!corpus_file.empty()) {
      for (const auto& i : corpus::load_corpus_file(corpus_file)) {
        spec.issues.push_back(i.issue_id);
        if (!i.issue_type.empty()) spec.issue_types[i.issue_id] = i.issue_type;
        if (spec.project.empty()) spec.project = i.project;
      }
    } else {
      std::stringstream is(issues);
      for (std::string i; std::getline(is, i, ',');)
        if (!i.empty()) spec.issues.push_back(i);
    }
    auto s = workflow::parse_scheme(scheme);
    if (!s) throw ValidationError("unknown scheme " + scheme);
    spec.policy = {*s, k};
    auto st = store.open();
    auto session = st->create_session(spec);
    std::cout << "created session " << session.id << " with " << session.issues.size()
              << " issues\n";
  });

  auto* assign_cmd = cmd->add_subcommand("assign", "Show the issue assignment");
  store.attach(assign_cmd);
  assign_cmd->add_option("--session", id, "Session id")->required();
  assign_cmd->add_option("--coder", coder, "Only this coder's queue");
  assign_cmd->callback([] {
    auto s = store.open()->session(id);
    if (!coder.empty()) {
      for (const auto& i : s.issues_for(coder)) std::cout << i << '\n';
      return;
    }
    for (const auto& i : s.issues) {
      std::cout << i;
      for (const auto& c : s.assignment.at(i)) std::cout << '\t' << c;
      std::cout << '\n';
    }
  });

  auto* status = cmd->add_subcommand("status", "Session state and progress");
  store.attach(status);
  status->add_option("--session", id, "Session id")->required();
  status->callback([] {
    auto snap = store.open()->snapshot(id);
    auto report = snap.disagreements();
    std::cout << "session\t" << snap.session.id << "\nstate\t"
              << workflow::to_string(snap.session.state) << "\nissues\t"
              << snap.session.issues.size() << "\npending\t" << report.pending.size()
              << "\nunanimous\t" << report.unanimous.size() << "\ndisagreements\t"
              << report.disagreements.size() << "\nfinal labels\t" << snap.finals.size() << '\n';
  });

  auto* label = cmd->add_subcommand("label", "Submit a coder's labels for an issue");
  store.attach(label);
  label->add_option("--session", id, "Session id")->required();
  label->add_option("--coder", coder, "Coder id")->required();
  label->add_option("--issue", issue, "Issue id")->required();
  label->add_option("--labels", labels, "Requirement ids, e.g. R38,R39 (empty for none)");
  label->add_option("--base-version", base_version, "Version last seen; stale versions are rejected");
  label->callback([] {
    auto rec = store.open()->submit_labels(id, coder, issue, parse_label_set(labels), base_version);
    std::cout << rec.issue_id << '\t' << rec.coder_id << "\tv" << rec.version << '\t'
              << format_label_set(rec.labels) << '\n';
  });

  auto* dis = cmd->add_subcommand("disagreements", "Issues whose coders chose different sets");
  store.attach(dis);
  dis->add_option("--session", id, "Session id")->required();
  dis->add_flag("--json", as_json, "Machine-readable output");
  dis->callback([] {
    auto report = store.open()->disagreements(id);
    if (as_json) {
      std::cout << json(report).dump(2) << '\n';
      return;
    }
    for (const auto& d : report.disagreements) {
      std::cout << d.issue_id;
      for (const auto& [c, s] : d.sets) std::cout << '\t' << c << '=' << '{' << format_label_set(s) << '}';
      std::cout << "\tmasi=" << fixed(d.masi_distance, 3) << '\n';
    }
    for (const auto& p : report.pending) {
      std::cout << p.issue_id << "\tpending:";
      for (const auto& c : p.missing_coders) std::cout << ' ' << c;
      std::cout << '\n';
    }
    std::cerr << report.disagreements.size() << " disagreements, " << report.unanimous.size()
              << " unanimous, " << report.pending.size() << " pending\n";
  });

  auto* start = cmd->add_subcommand("start-adjudication", "Close labelling and open adjudication");
  store.attach(start);
  start->add_option("--session", id, "Session id")->required();
  start->callback([] {
    store.open()->start_adjudication(id);
    std::cout << "session " << id << " is adjudicating\n";
  });

  auto* adj = cmd->add_subcommand("adjudicate", "Record the final labels of an issue");
  store.attach(adj);
  adj->add_option("--session", id, "Session id")->required();
  adj->add_option("--issue", issue, "Issue id")->required();
  adj->add_option("--labels", labels, "Final requirement ids");
  adj->add_option("--resolution", resolution, "unanimous, combined or reclassified (checked)");
  adj->add_option("--adjudicators", adjudicators, "Comma-separated coder ids");
  adj->add_option("--note", note, "Free-text note");
  adj->callback([] {
    std::optional<Resolution> r;
    if (!resolution.empty()) {
      r = parse_resolution(resolution);
      if (!r) throw ValidationError("unknown resolution " + resolution);
    }
    std::vector<std::string> who;
    std::stringstream ss(adjudicators);
    for (std::string a; std::getline(ss, a, ',');)
      if (!a.empty()) who.push_back(a);
    auto f = store.open()->adjudicate(id, issue, parse_label_set(labels), r, who, note);
    std::cout << f.issue_id << '\t' << to_string(f.resolution) << '\t' << format_label_set(f.labels)
              << '\n';
  });

  auto* fin = cmd->add_subcommand("finalize", "Close the session and write the gold dataset");
  store.attach(fin);
  fin->add_option("--session", id, "Session id")->required();
  fin->add_option("-o,--output", output, "Gold file (stdout by default)");
  fin->callback([] {
    auto out = store.open()->finalize(id);
    emit(output, gold_to_string(out.gold));
    std::cerr << "finalized " << out.gold.entries.size() << " issues\n";
  });

  auto* gold = cmd->add_subcommand("gold", "Write the gold dataset of a finalized session");
  store.attach(gold);
  gold->add_option("--session", id, "Session id")->required();
  gold->add_option("-o,--output", output, "Gold file (stdout by default)");
  gold->callback([] { emit(output, gold_to_string(store.open()->gold(id).gold)); });

  auto* exp = cmd->add_subcommand("export-labels", "Latest coder labels as unit/coder/labels TSV");
  store.attach(exp);
  exp->add_option("--session", id, "Session id")->required();
  exp->add_option("-o,--output", output, "Output file (stdout by default)");
  exp->callback([] {
    auto snap = store.open()->snapshot(id);
    std::ostringstream out;
    for (const auto& unit : snap.units())
      for (const auto& l : unit.labelings)
        out << unit.id << '\t' << l.coder << '\t' << format_label_set(l.labels) << '\n';
    emit(output, out.str());
  });

  auto* agree = cmd->add_subcommand("agreement", "Share of issues whose coders fully agree");
  store.attach(agree);
  agree->add_option("--session", id, "Session id")->required();
  agree->callback([] {
    std::cout << fixed(store.open()->percent_total_agreement(id) * 100.0, 2) << "%\n";
  });
}

void add_irr(CLI::App& app) {
  auto* cmd = app.add_subcommand("irr", "Inter-rater reliability");
  cmd->require_subcommand(1);
  static std::string file, distance = "masi", pair;
  static std::size_t bootstrap = 0;
  static std::uint64_t seed = 1;
  static double level = 0.95;
  static bool as_json = false;

  auto* alpha = cmd->add_subcommand("alpha", "Krippendorff's alpha over label sets");
  alpha->add_option("file", file, "unit<TAB>coder<TAB>labels file")->required();
  alpha->add_option("--distance", distance, "masi, jaccard or nominal")->capture_default_str();
  alpha->add_option("--pair", pair, "Restrict to two coders, e.g. c1,c2");
  alpha->add_option("--bootstrap", bootstrap, "Bootstrap replicates for a confidence interval");
  alpha->add_option("--seed", seed, "Bootstrap seed")->capture_default_str();
  alpha->add_option("--level", level, "Confidence level")->capture_default_str();
  alpha->add_flag("--json", as_json, "Machine-readable output");
  alpha->callback([] {
    auto kind = irr::parse_distance(distance);
    if (!kind) throw ValidationError("unknown distance " + distance);
    const auto d = irr::distance_function(*kind);
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    auto units = irr::parse_labeled_units(in);
    if (!pair.empty()) {
      auto comma = pair.find(',');
      if (comma == std::string::npos) throw ValidationError("--pair needs two coders");
      const std::string a = pair.substr(0, comma), b = pair.substr(comma + 1);
      irr::LabeledUnits restricted;
      for (const auto& u : units) {
        irr::Unit r{u.id, {}};
        for (const auto& l : u.labelings)
          if (l.coder == a || l.coder == b) r.labelings.push_back(l);
        restricted.push_back(std::move(r));
      }
      units = std::move(restricted);
    }
    auto result = pair.empty() ? irr::krippendorff_alpha(units, d)
                               : irr::pairwise_alpha(units, pair.substr(0, pair.find(',')),
                                                     pair.substr(pair.find(',') + 1), d);
    std::optional<irr::ConfidenceInterval> ci;
    if (bootstrap) ci = irr::bootstrap_alpha(units, d, bootstrap, level, seed);
    if (as_json) {
      json out{{"result", result}, {"distance", distance}};
      if (ci) out["interval"] = *ci;
      std::cout << out.dump(2) << '\n';
      return;
    }
    std::cout << describe(result) << '\n';
    if (ci) {
      std::cout << fixed(ci->level * 100, 0) << "% interval [" << fixed(ci->lower, 3) << ", "
                << fixed(ci->upper, 3) << "] over " << ci->iterations << " replicates\n";
    }
  });

  auto* fleiss = cmd->add_subcommand("fleiss", "Fleiss' kappa over an item-by-category count matrix");
  fleiss->add_option("file", file, "Matrix file: 'm <raters>' then one row per item")->required();
  fleiss->add_flag("--json", as_json, "Machine-readable output");
  fleiss->callback([] {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    auto result = irr::fleiss_kappa(irr::RatingsMatrix::parse(in));
    if (as_json) {
      std::cout << json(result).dump(2) << '\n';
    } else {
      std::cout << describe(result) << '\n';
    }
  });
}

void add_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("stats", "Sampling, coverage, rankings and rank-sum tests");
  cmd->require_subcommand(1);
  static std::string alt = "two-sided", method = "auto", a_file, b_file, gold_file,
                     seed = default_taxonomy();
  static std::size_t k = 10, population = 0;
  static bool by_type = false, as_json = false;
  static stats::SamplingConfig sampling;

  auto* mw = cmd->add_subcommand("mw", "Mann-Whitney U (Wilcoxon rank-sum) test");
  mw->add_option("--alt", alt, "less, greater or two-sided")->capture_default_str();
  mw->add_option("--method", method, "auto, exact or normal")->capture_default_str();
  mw->add_option("x", a_file, "First sample (numbers)")->required();
  mw->add_option("y", b_file, "Second sample (numbers)")->required();
  mw->add_flag("--json", as_json, "Machine-readable output");
  mw->callback([] {
    auto a = stats::parse_alternative(alt);
    if (!a) throw ValidationError("unknown alternative " + alt);
    stats::MethodPolicy policy = stats::MethodPolicy::kAuto;
    if (method == "exact") policy = stats::MethodPolicy::kExact;
    else if (method == "normal") policy = stats::MethodPolicy::kNormal;
    else if (method != "auto") throw ValidationError("unknown method " + method);
    auto r = stats::mann_whitney(read_sample(a_file), read_sample(b_file), *a, policy);
    if (as_json) {
      std::cout << json(r).dump(2) << '\n';
      return;
    }
    std::cout << "U\t" << r.u << "\np\t" << r.p_value << "\np (report)\t"
              << report::format_p_value(r.p_value) << "\nalternative\t" << stats::to_string(r.alternative)
              << "\ncles\t" << fixed(r.cles, 3) << "\neffect size (tail)\t"
              << fixed(r.directional_cles(), 3) << "\nrbc\t" << fixed(r.rbc, 3) << "\nmethod\t"
              << stats::to_string(r.method) << '\n';
  });

  auto* cov = cmd->add_subcommand("coverage", "Share of issues per privacy goal");
  cov->add_option("gold", gold_file, "Gold dataset")->required();
  cov->add_option("taxonomy", seed, "Taxonomy seed")->capture_default_str();
  cov->add_flag("--json", as_json, "Machine-readable output");
  cov->callback([] {
    auto table = stats::coverage_by_category(load_gold_file(gold_file), taxonomy::load_taxonomy_file(seed));
    if (as_json) {
      std::cout << json(table).dump(2) << '\n';
      return;
    }
    for (const auto& r : table.rows)
      std::cout << r.title << '\t' << r.requirements << '\t' << fixed(r.percentage, 2) << '\n';
  });

  auto* top = cmd->add_subcommand("top", "Most frequent requirements");
  top->add_option("-k", k, "Ranking length")->capture_default_str();
  top->add_flag("--by-type", by_type, "Also rank within each issue type");
  top->add_option("gold", gold_file, "Gold dataset")->required();
  top->add_flag("--json", as_json, "Machine-readable output");
  top->callback([] {
    auto r = stats::top_requirements(load_gold_file(gold_file), k, by_type);
    if (as_json) {
      std::cout << json(r).dump(2) << '\n';
      return;
    }
    for (const auto& e : r.overall) std::cout << e.id.str() << '\t' << e.count << '\n';
    for (const auto& [type, entries] : r.by_type) {
      std::cout << "\n[" << (type.empty() ? "unknown" : type) << "]\n";
      for (const auto& e : entries) std::cout << e.id.str() << '\t' << e.count << '\n';
    }
  });

  auto* ss = cmd->add_subcommand("samplesize", "Sample size with finite-population correction");
  ss->add_option("population", population, "Population size")->required();
  ss->add_option("--confidence", sampling.confidence, "Confidence level")->capture_default_str();
  ss->add_option("--interval", sampling.interval, "Margin in percentage points")->capture_default_str();
  ss->add_option("--proportion", sampling.proportion, "Assumed proportion")->capture_default_str();
  ss->callback([] { std::cout << stats::sample_size(population, sampling) << '\n'; });
}

void add_report(CLI::App& app) {
  static std::string config, format = "markdown", output, taxonomy_path, statements, generated_at;
  auto* cmd = app.add_subcommand("report", "Assemble and render a reproduction report");
  cmd->add_option("--config", config, "JSON file describing projects and inputs");
  cmd->add_option("--taxonomy", taxonomy_path, "Taxonomy seed");
  cmd->add_option("--statements", statements, "Coded statements TSV");
  cmd->add_option("--format", format, "json, markdown or text")->capture_default_str();
  cmd->add_option("--generated-at", generated_at, "Timestamp recorded in the report");
  cmd->add_option("-o,--output", output, "Output file (stdout by default)");
  cmd->callback([] {
    report::BundleInputs inputs;
    const auto fmt = report::parse_report_format(format);
    if (!config.empty()) {
      const fs::path base = fs::path(config).parent_path();
      auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
      json j;
      try {
        j = json::parse(read_file(config));
      } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0, config);
      }
      if (j.contains("taxonomy")) inputs.taxonomy = resolve(j["taxonomy"].get<std::string>());
      if (j.contains("statements")) inputs.statements = resolve(j["statements"].get<std::string>());
      inputs.generated_at = j.value("generated_at", std::string{});
      for (const auto& p : j.value("projects", json::array())) {
        report::ProjectInput in;
        in.name = p.at("name").get<std::string>();
        for (const char* key : {"corpus", "baseline", "gold", "labels"}) {
          if (!p.contains(key)) continue;
          const auto path = resolve(p[key].get<std::string>());
          if (std::string(key) == "corpus") in.corpus = path;
          if (std::string(key) == "baseline") in.baseline = path;
          if (std::string(key) == "gold") in.gold = path;
          if (std::string(key) == "labels") in.labels = path;
        }
        for (const auto& pr : p.value("pairs", json::array()))
          in.pairs.emplace_back(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
        if (p.contains("alternative")) {
          auto a = stats::parse_alternative(p["alternative"].get<std::string>());
          if (!a) throw ValidationError("unknown alternative in project " + in.name);
          in.alternative = *a;
        }
        in.top_k = p.value("top_k", std::size_t{10});
        inputs.projects.push_back(std::move(in));
      }
    }
    if (!taxonomy_path.empty()) inputs.taxonomy = taxonomy_path;
    if (!statements.empty()) inputs.statements = statements;
    if (!generated_at.empty()) inputs.generated_at = generated_at;
    emit(output, report::render_report(report::build_bundle(inputs), fmt));
  });
}

void add_serve(CLI::App& app) {
  static service::ServiceConfig cfg;
  static std::string bind, cors, corpus_path;
  auto* cmd = app.add_subcommand("serve", "Run the /v1 HTTP API");
  cmd->add_option("--store", cfg.store, "Workflow journal (env PRIVLENS_STORE)");
  cmd->add_option("--bind", bind, "host:port (env PRIVLENS_BIND, default 127.0.0.1:8080)");
  cmd->add_option("--cors", cors, "Comma-separated allowed origins (env PRIVLENS_CORS_ORIGINS)");
  cmd->add_option("--taxonomy", cfg.taxonomy, "Taxonomy seed (env PRIVLENS_TAXONOMY)");
  cmd->add_option("--corpus", corpus_path, "Canonical issue file (env PRIVLENS_CORPUS)");
  cmd->callback([] {
    service::ServiceConfig base;
    base.taxonomy = data_file("taxonomy.seed");
    base.store = "privlens.journal";
    base = service::ServiceConfig::from_env(base);
    if (!cfg.store.empty()) base.store = cfg.store;
    if (!cfg.taxonomy.empty()) base.taxonomy = cfg.taxonomy;
    if (!corpus_path.empty()) base.corpus = fs::path(corpus_path);
    if (!bind.empty()) base.set_bind(bind);
    if (!cors.empty()) {
      base.cors_origins.clear();
      std::stringstream ss(cors);
      for (std::string o; std::getline(ss, o, ',');)
        if (!o.empty()) base.cors_origins.push_back(o);
    }

    // Block the stop signals so only the waiting thread sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::Service svc(base);
    const int port = svc.bind();
    std::cerr << "privlens serving on " << base.host << ':' << port << " (store "
              << base.store.string() << ")\n";
    std::thread server([&] { svc.listen(); });
    int received = 0;
    sigwait(&signals, &received);
    std::cerr << "shutting down\n";
    svc.stop();
    server.join();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privlens: privacy requirement taxonomy, issue labelling and agreement analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "privlens 1.0.0");
  add_taxonomy(app);
  add_refine(app);
  add_ingest(app);
  add_corpus(app);
  add_session(app);
  add_irr(app);
  add_stats(app);
  add_report(app);
  add_serve(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ValidationError& e) {
    std::cerr << "privlens: validation error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "privlens: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "privlens: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
