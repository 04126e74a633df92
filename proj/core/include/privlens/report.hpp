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

#ifndef PRIVLENS_REPORT_HPP_
#define PRIVLENS_REPORT_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "privlens/corpus.hpp"
#include "privlens/irr.hpp"
#include "privlens/refinement.hpp"
#include "privlens/stats.hpp"

namespace privlens::report {

// A section either holds data or says why it does not.
template <typename T>
struct Section {
  std::optional<T> data;
  std::string skip_reason;

  static Section skipped(std::string reason) { return {std::nullopt, std::move(reason)}; }
  static Section of(T value) { return {std::move(value), {}}; }
  bool present() const noexcept { return data.has_value(); }
};

struct TaxonomySummary {
  std::string version;
  std::size_t requirements = 0;
  std::vector<std::pair<std::string, std::size_t>> category_counts;
  std::size_t memberships = 0;
  std::vector<std::string> violations;
};

struct ProjectStats {
  std::string project;
  corpus::DescriptiveStats stats;
};

struct IrrRow {
  std::string project;
  std::string label;  // "c1-c2", "fleiss"
  irr::ReliabilityResult result;
  std::optional<double> total_agreement;  // fraction
};

struct ProjectCoverage {
  std::string project;
  stats::CoverageTable table;
};

struct ProjectRanking {
  std::string project;
  stats::Ranking ranking;
};

struct TestRow {
  std::string project;
  std::string metric;  // "resolution-days", "comments"
  std::string x_label;
  std::string y_label;
  stats::TestResult result;
};

struct ReportBundle {
  Section<TaxonomySummary> taxonomy;
  Section<refine::PipelineAudit> pipeline_audit;
  Section<std::vector<ProjectStats>> corpus_stats;
  Section<std::vector<IrrRow>> irr;
  Section<std::vector<ProjectCoverage>> coverage;
  Section<std::vector<ProjectRanking>> rankings;
  Section<std::vector<TestRow>> tests;
  std::string generated_at;
  std::map<std::string, std::string> input_digests;  // name -> sha256 hex

  // Every section skipped with `reason`.
  static ReportBundle empty(const std::string& reason);
};

enum class ReportFormat { kJson, kMarkdown, kText };

std::string_view to_string(ReportFormat format);
// Throws ValidationError for unknown names.
ReportFormat parse_report_format(std::string_view text);

std::string render_report(const ReportBundle& bundle, ReportFormat format);

// "<0.001" below one thousandth, three decimals otherwise.
std::string format_p_value(double p);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ProjectInput {
  std::string name;
  std::optional<std::filesystem::path> corpus;    // privacy issues
  std::optional<std::filesystem::path> baseline;  // non-privacy issues
  std::optional<std::filesystem::path> gold;
  std::optional<std::filesystem::path> labels;  // unit/coder/labels TSV
  std::vector<std::pair<std::string, std::string>> pairs;
  stats::Alternative alternative = stats::Alternative::kTwoSided;
  std::size_t top_k = 10;
};

struct BundleInputs {
  std::optional<std::filesystem::path> taxonomy;
  std::optional<std::filesystem::path> statements;
  std::vector<ProjectInput> projects;
  std::string generated_at;
};

// Sections whose inputs are missing are skipped with a reason; failures in
// present inputs propagate.
ReportBundle build_bundle(const BundleInputs& inputs);

}  // namespace privlens::report

#endif  // PRIVLENS_REPORT_HPP_
