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

#include "privlens/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <functional>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "privlens/error.hpp"
#include "privlens/gold.hpp"
#include "privlens/json_io.hpp"

namespace privlens::report {

namespace {

using nlohmann::json;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out = buf;
  if (out == "-0.000" || out == "-0.00" || out == "-0.0") out.erase(0, 1);
  return out;
}

// Integers print bare; halves keep one decimal.
std::string compact(double value) {
  if (value == std::floor(value)) return fixed(value, 0);
  return fixed(value, 1);
}

std::string tail_name(stats::Alternative a) {
  switch (a) {
    case stats::Alternative::kLess: return "Less";
    case stats::Alternative::kGreater: return "Greater";
    case stats::Alternative::kTwoSided: return "Two-sided";
  }
  return "?";
}

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
  std::vector<bool> right;  // per column

  std::string render(ReportFormat format) const {
    std::ostringstream out;
    if (format == ReportFormat::kMarkdown) {
      out << '|';
      for (const auto& h : headers) out << ' ' << h << " |";
      out << "\n|";
      for (std::size_t c = 0; c < headers.size(); ++c) out << (right[c] ? " ---: |" : " --- |");
      out << '\n';
      for (const auto& row : rows) {
        out << '|';
        for (const auto& cell : row) out << ' ' << cell << " |";
        out << '\n';
      }
      return out.str();
    }
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::string pad(width[c] - cells[c].size(), ' ');
        if (c) s += "  ";
        s += right[c] ? pad + cells[c] : cells[c] + pad;
      }
      while (!s.empty() && s.back() == ' ') s.pop_back();
      return s + '\n';
    };
    out << line(headers);
    std::size_t total = 0;
    for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
    out << std::string(total, '-') << '\n';
    for (const auto& row : rows) out << line(row);
    return out.str();
  }
};

std::string heading(const std::string& title, ReportFormat format) {
  if (format == ReportFormat::kMarkdown) return "## " + title + "\n\n";
  return title + "\n" + std::string(title.size(), '=') + "\n\n";
}

std::string skipped_line(const std::string& reason, ReportFormat format) {
  return format == ReportFormat::kMarkdown ? "_Skipped: " + reason + "_\n\n"
                                           : "Skipped: " + reason + "\n\n";
}

std::string render_taxonomy(const TaxonomySummary& t, ReportFormat f) {
  std::string out = "Version " + t.version + ", " + std::to_string(t.requirements) +
                    " requirements, " + std::to_string(t.memberships) +
                    " category memberships.\n\n";
  Table table{{"Category", "Requirements"}, {}, {false, true}};
  for (const auto& [cat, n] : t.category_counts) table.rows.push_back({cat, std::to_string(n)});
  out += table.render(f) + "\n";
  if (t.violations.empty()) {
    out += "Validation: pass\n\n";
  } else {
    out += "Validation: " + std::to_string(t.violations.size()) + " violation(s)\n";
    for (const auto& v : t.violations) out += "- " + v + "\n";
    out += "\n";
  }
  return out;
}

std::string render_audit(const refine::PipelineAudit& a, ReportFormat f) {
  Table table{{"Source", "Shortlisted", "Identified"}, {}, {false, true, true}};
  for (auto s : {taxonomy::RegulationSource::kGdpr, taxonomy::RegulationSource::kIso29100,
                 taxonomy::RegulationSource::kThailandPdpa, taxonomy::RegulationSource::kApec}) {
    auto sh = a.shortlisted.find(s);
    auto id = a.identified.find(s);
    table.rows.push_back({std::string(to_string(s)),
                          std::to_string(sh == a.shortlisted.end() ? 0 : sh->second),
                          std::to_string(id == a.identified.end() ? 0 : id->second)});
  }
  table.rows.push_back(
      {"Total", std::to_string(a.total_shortlisted()), std::to_string(a.total_identified())});
  return table.render(f) + "\nMerged away: " + std::to_string(a.merged_away) +
         "\nFinal requirements: " + std::to_string(a.final_count) + "\n\n";
}

std::string render_corpus(const std::vector<ProjectStats>& projects, ReportFormat f) {
  Table table{{"Project", "Metric", "min", "max", "mean", "median", "mode"},
              {},
              {false, false, true, true, true, true, true}};
  for (const auto& p : projects) {
    auto add = [&](const std::string& metric, const corpus::MetricStats& m) {
      table.rows.push_back({p.project, metric, std::to_string(m.min), std::to_string(m.max),
                            std::to_string(m.mean_rounded()), compact(m.median),
                            std::to_string(m.mode)});
    };
    add("Contributors", p.stats.contributors);
    if (p.stats.resolution_days) add("Resolution time (days)", *p.stats.resolution_days);
    add("Comments", p.stats.comments);
  }
  return table.render(f) + "\n";
}

std::string render_irr(const std::vector<IrrRow>& rows, ReportFormat f) {
  Table table{{"Project", "Coders", "Statistic", "Value", "Units", "Total agreement"},
              {},
              {false, false, false, true, true, true}};
  for (const auto& r : rows) {
    std::string value = fixed(r.result.value, 3);
    if (r.result.degenerate) value += " (degenerate)";
    table.rows.push_back({r.project, r.label, std::string(irr::to_string(r.result.statistic)), value,
                          std::to_string(r.result.n_units),
                          r.total_agreement ? fixed(*r.total_agreement * 100.0, 2) + "%" : "-"});
  }
  return table.render(f) + "\n";
}

std::string render_coverage(const std::vector<ProjectCoverage>& projects, ReportFormat f) {
  Table table{{"Privacy goal", "No. of privacy requirements"}, {}, {false, true}};
  for (const auto& p : projects) {
    table.headers.push_back(p.project);
    table.right.push_back(true);
  }
  if (!projects.empty()) {
    for (std::size_t i = 0; i < projects.front().table.rows.size(); ++i) {
      const auto& first = projects.front().table.rows[i];
      std::vector<std::string> row{first.title, std::to_string(first.requirements)};
      for (const auto& p : projects) row.push_back(fixed(p.table.rows[i].percentage, 2));
      table.rows.push_back(std::move(row));
    }
  }
  std::string out = table.render(f) + "\n";
  for (const auto& p : projects)
    out += p.project + ": " + std::to_string(p.table.total_issues) + " issues.\n";
  return out + "\n";
}

std::string render_rankings(const std::vector<ProjectRanking>& projects, ReportFormat f) {
  Table table{{"Project", "Rank", "Requirement", "Issues"}, {}, {false, true, false, true}};
  for (const auto& p : projects) {
    for (std::size_t i = 0; i < p.ranking.overall.size(); ++i) {
      const auto& e = p.ranking.overall[i];
      table.rows.push_back({p.project, std::to_string(i + 1), e.id.str(), std::to_string(e.count)});
    }
  }
  return table.render(f) + "\n";
}

std::string render_tests(const std::vector<TestRow>& rows, ReportFormat f) {
  Table table{{"Project", "Metric", "Comparison", "One-sided tail", "p-value", "Effect size",
               "RBC", "Method"},
              {},
              {false, false, false, false, true, true, true, false}};
  for (const auto& r : rows) {
    table.rows.push_back({r.project, r.metric, r.x_label + " vs " + r.y_label,
                          tail_name(r.result.alternative), format_p_value(r.result.p_value),
                          fixed(r.result.directional_cles(), 3), fixed(r.result.rbc, 3),
                          std::string(stats::to_string(r.result.method))});
  }
  return table.render(f) +
         "\nU counts wins of the first sample. \"Less\" tests first < second, \"Greater\" "
         "first > second. Effect size is the common-language effect size in the direction of "
         "the tail; RBC is 2*CLES-1 for the first sample.\n\n";
}

template <typename T>
json section_json(const Section<T>& s, const std::function<json(const T&)>& body) {
  if (!s.present()) return json{{"status", "skipped"}, {"reason", s.skip_reason}};
  return json{{"status", "present"}, {"data", body(*s.data)}};
}

}  // namespace

ReportBundle ReportBundle::empty(const std::string& reason) {
  ReportBundle b;
  b.taxonomy = decltype(b.taxonomy)::skipped(reason);
  b.pipeline_audit = decltype(b.pipeline_audit)::skipped(reason);
  b.corpus_stats = decltype(b.corpus_stats)::skipped(reason);
  b.irr = decltype(b.irr)::skipped(reason);
  b.coverage = decltype(b.coverage)::skipped(reason);
  b.rankings = decltype(b.rankings)::skipped(reason);
  b.tests = decltype(b.tests)::skipped(reason);
  return b;
}

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson: return "json";
    case ReportFormat::kMarkdown: return "markdown";
    case ReportFormat::kText: return "text";
  }
  return "?";
}

ReportFormat parse_report_format(std::string_view text) {
  for (auto f : {ReportFormat::kJson, ReportFormat::kMarkdown, ReportFormat::kText})
    if (to_string(f) == text) return f;
  throw ValidationError("unknown report format '" + std::string(text) +
                        "' (expected json, markdown or text)");
}

std::string format_p_value(double p) { return p < 0.001 ? "<0.001" : fixed(p, 3); }

json bundle_json(const ReportBundle& b) {
  json j;
  j["generated_at"] = b.generated_at;
  j["input_digests"] = b.input_digests;
  j["taxonomy"] = section_json<TaxonomySummary>(b.taxonomy, [](const TaxonomySummary& t) {
    json counts = json::object();
    for (const auto& [c, n] : t.category_counts) counts[c] = n;
    return json{{"version", t.version},       {"requirements", t.requirements},
                {"categories", counts},       {"memberships", t.memberships},
                {"violations", t.violations}};
  });
  j["pipeline_audit"] = section_json<refine::PipelineAudit>(
      b.pipeline_audit, [](const refine::PipelineAudit& a) { return json(a); });
  j["corpus_stats"] = section_json<std::vector<ProjectStats>>(
      b.corpus_stats, [](const std::vector<ProjectStats>& ps) {
        json out = json::array();
        for (const auto& p : ps) out.push_back({{"project", p.project}, {"stats", p.stats}});
        return out;
      });
  j["irr"] = section_json<std::vector<IrrRow>>(b.irr, [](const std::vector<IrrRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"project", r.project},
                     {"coders", r.label},
                     {"result", r.result},
                     {"total_agreement", r.total_agreement ? json(*r.total_agreement) : json(nullptr)}});
    }
    return out;
  });
  j["coverage"] = section_json<std::vector<ProjectCoverage>>(
      b.coverage, [](const std::vector<ProjectCoverage>& ps) {
        json out = json::array();
        for (const auto& p : ps) out.push_back({{"project", p.project}, {"table", p.table}});
        return out;
      });
  j["rankings"] = section_json<std::vector<ProjectRanking>>(
      b.rankings, [](const std::vector<ProjectRanking>& ps) {
        json out = json::array();
        for (const auto& p : ps) out.push_back({{"project", p.project}, {"ranking", p.ranking}});
        return out;
      });
  j["tests"] = section_json<std::vector<TestRow>>(b.tests, [](const std::vector<TestRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
      out.push_back({{"project", r.project},
                     {"metric", r.metric},
                     {"x", r.x_label},
                     {"y", r.y_label},
                     {"result", r.result}});
    }
    return out;
  });
  return j;
}

std::string render_report(const ReportBundle& b, ReportFormat format) {
  if (format == ReportFormat::kJson) return bundle_json(b).dump(2) + "\n";
  std::string out = format == ReportFormat::kMarkdown ? "# privlens report\n\n"
                                                      : "privlens report\n\n";
  if (!b.generated_at.empty()) out += "Generated at " + b.generated_at + ".\n\n";
  auto emit = [&](const std::string& title, const auto& section, auto body) {
    out += heading(title, format);
    out += section.present() ? body(*section.data, format) : skipped_line(section.skip_reason, format);
  };
  emit("Taxonomy validation", b.taxonomy, render_taxonomy);
  emit("Pipeline audit", b.pipeline_audit, render_audit);
  emit("Corpus statistics", b.corpus_stats, render_corpus);
  emit("Inter-rater reliability", b.irr, render_irr);
  emit("Coverage by privacy goal", b.coverage, render_coverage);
  emit("Top requirements", b.rankings, render_rankings);
  emit("Rank-sum tests", b.tests, render_tests);
  if (!b.input_digests.empty()) {
    out += heading("Input digests", format);
    Table table{{"Input", "SHA-256"}, {}, {false, false}};
    for (const auto& [name, digest] : b.input_digests) table.rows.push_back({name, digest});
    out += table.render(format);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

ReportBundle build_bundle(const BundleInputs& inputs) {
  ReportBundle b = ReportBundle::empty("input not provided");
  b.generated_at = inputs.generated_at;
  std::optional<taxonomy::Taxonomy> tax;

  if (inputs.taxonomy) {
    b.input_digests["taxonomy"] = sha256_file(*inputs.taxonomy);
    std::ifstream in(*inputs.taxonomy);
    if (!in) throw IoError("cannot open " + inputs.taxonomy->string());
    tax = taxonomy::parse_taxonomy(in);
    TaxonomySummary s{tax->version(), tax->size(), {}, 0, taxonomy::validate(*tax)};
    for (const auto& node : tax->tree().categories()) {
      const std::size_t n = tax->category_count(node.id);
      s.category_counts.emplace_back(node.id, n);
      s.memberships += n;
    }
    b.taxonomy = Section<TaxonomySummary>::of(std::move(s));
  } else {
    b.taxonomy = Section<TaxonomySummary>::skipped("no taxonomy seed given");
  }

  if (inputs.statements) {
    b.input_digests["statements"] = sha256_file(*inputs.statements);
    auto statements = refine::load_coded_statements(*inputs.statements);
    b.pipeline_audit = Section<refine::PipelineAudit>::of(refine::run_refinement(statements).audit);
  } else {
    b.pipeline_audit = Section<refine::PipelineAudit>::skipped("no coded statements given");
  }

  std::vector<ProjectStats> corpus_rows;
  std::vector<IrrRow> irr_rows;
  std::vector<ProjectCoverage> coverage_rows;
  std::vector<ProjectRanking> ranking_rows;
  std::vector<TestRow> test_rows;
  bool gold_without_taxonomy = false;

  for (const auto& p : inputs.projects) {
    std::vector<corpus::IssueReport> issues;
    if (p.corpus) {
      b.input_digests[p.name + ".corpus"] = sha256_file(*p.corpus);
      issues = corpus::load_corpus_file(*p.corpus);
      corpus_rows.push_back({p.name, corpus::descriptive_stats(issues)});
    }
    if (p.corpus && p.baseline) {
      b.input_digests[p.name + ".baseline"] = sha256_file(*p.baseline);
      auto baseline = corpus::load_corpus_file(*p.baseline);
      std::vector<double> bx, by, cx, cy;
      for (const auto& i : baseline) {
        if (auto d = i.resolution_days()) bx.push_back(static_cast<double>(*d));
        cx.push_back(i.comments);
      }
      for (const auto& i : issues) {
        if (auto d = i.resolution_days()) by.push_back(static_cast<double>(*d));
        cy.push_back(i.comments);
      }
      if (!bx.empty() && !by.empty()) {
        test_rows.push_back({p.name, "resolution-days", "non-privacy", "privacy",
                             stats::mann_whitney(bx, by, p.alternative)});
      }
      if (!cx.empty() && !cy.empty()) {
        test_rows.push_back({p.name, "comments", "non-privacy", "privacy",
                             stats::mann_whitney(cx, cy, p.alternative)});
      }
    }
    if (p.gold) {
      b.input_digests[p.name + ".gold"] = sha256_file(*p.gold);
      auto gold = load_gold_file(*p.gold);
      if (tax) {
        coverage_rows.push_back({p.name, stats::coverage_by_category(gold, *tax)});
      } else {
        gold_without_taxonomy = true;
      }
      ranking_rows.push_back({p.name, stats::top_requirements(gold, p.top_k)});
    }
    if (p.labels) {
      b.input_digests[p.name + ".labels"] = sha256_file(*p.labels);
      std::ifstream in(*p.labels);
      if (!in) throw IoError("cannot open " + p.labels->string());
      auto units = irr::parse_labeled_units(in);
      const auto masi = irr::distance_function(irr::DistanceKind::kMasi);
      std::size_t comparable = 0, agreed = 0;
      for (const auto& u : units) {
        if (u.labelings.size() < 2) continue;
        ++comparable;
        bool same = true;
        for (const auto& l : u.labelings) same = same && l.labels == u.labelings.front().labels;
        agreed += same;
      }
      IrrRow all{p.name, "all", irr::krippendorff_alpha(units, masi), std::nullopt};
      if (comparable) all.total_agreement = static_cast<double>(agreed) / static_cast<double>(comparable);
      irr_rows.push_back(std::move(all));
      for (const auto& [a, c] : p.pairs) {
        irr_rows.push_back({p.name, a + "-" + c, irr::pairwise_alpha(units, a, c, masi), std::nullopt});
      }
    }
  }

  auto fill = [](auto& section, auto rows, const std::string& reason) {
    using S = std::decay_t<decltype(section)>;
    section = rows.empty() ? S::skipped(reason) : S::of(std::move(rows));
  };
  fill(b.corpus_stats, std::move(corpus_rows), "no project corpus given");
  fill(b.irr, std::move(irr_rows), "no coder label files given");
  fill(b.coverage, std::move(coverage_rows),
       gold_without_taxonomy ? "coverage needs the taxonomy seed" : "no gold dataset given");
  fill(b.rankings, std::move(ranking_rows), "no gold dataset given");
  fill(b.tests, std::move(test_rows), "no corpus with a non-privacy baseline given");
  return b;
}

}  // namespace privlens::report
