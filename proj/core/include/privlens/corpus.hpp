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

#ifndef PRIVLENS_CORPUS_HPP_
#define PRIVLENS_CORPUS_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privlens::corpus {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DD" and "YYYY-MM-DDTHH:MM:SS" with optional fraction and
// zone ("Z", "+08:00", "+0800"). Throws ParseError.
Timestamp parse_timestamp(std::string_view text);
// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);

struct IssueReport {
  std::string project;
  std::string issue_id;
  std::string title;
  std::string description;
  std::string issue_type;  // lower-case, hyphenated: "new-feature"
  std::string status;
  std::vector<std::string> components;
  Timestamp created{};
  std::optional<Timestamp> resolved;
  std::uint32_t contributors = 1;
  std::uint32_t comments = 0;
  // Source fields with no canonical slot, kept verbatim.
  std::map<std::string, std::string> extras;

  // Whole days from created to resolved, at least 1.
  std::optional<std::int64_t> resolution_days() const;

  friend bool operator==(const IssueReport&, const IssueReport&) = default;
};

std::int64_t resolution_days(Timestamp created, Timestamp resolved);

// "New Feature" -> "new-feature", "Bug-Regression" -> "bug-regression".
std::string normalize_issue_type(std::string_view text);
// Issue types the trackers of the two studied projects use; empty for others.
const std::vector<std::string>& known_issue_types(std::string_view project);

enum class ExportFormat { kMonorailCsv, kJiraJson, kCanonical };

std::string_view to_string(ExportFormat format);
std::optional<ExportFormat> parse_format(std::string_view text);

struct IngestOptions {
  // Used when the export carries no project of its own.
  std::string project;
};

struct IngestResult {
  std::vector<IssueReport> issues;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;  // one per skipped record
};

// Structural mismatches (bad CSV quoting, invalid JSON, missing ID column)
// throw ParseError with the record index. Records with unusable field values
// are skipped and counted.
IngestResult ingest(std::istream& in, ExportFormat format, const IngestOptions& options = {});
IngestResult ingest_file(const std::filesystem::path& path, ExportFormat format,
                         const IngestOptions& options = {});

// RFC 4180 reader. Quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

void write_canonical(std::ostream& out, std::span<const IssueReport> issues);
std::vector<IssueReport> load_corpus_file(const std::filesystem::path& path);

// Keeps issues carrying the tag as a component (case-insensitive, also
// matching hierarchical children such as "Privacy>Cookies") whose status is
// in `statuses`. Empty `statuses` accepts every status. Stable.
std::vector<IssueReport> filter_privacy_tagged(std::span<const IssueReport> issues,
                                               const std::set<std::string>& statuses,
                                               std::string_view tag = "privacy");

// Drops issues named in a reviewed exclusion list. Stable.
std::vector<IssueReport> apply_exclusions(std::span<const IssueReport> issues,
                                          const std::set<std::string>& excluded_ids);

inline constexpr std::size_t kDefaultMinContentTokens = 15;

// Word tokens left after removing fenced/{code} blocks and lines that look
// like stack frames, addresses or mangled symbols.
std::size_t content_tokens(std::string_view description);
bool flag_low_information(const IssueReport& issue,
                          std::size_t min_content_tokens = kDefaultMinContentTokens);

struct MetricStats {
  std::int64_t min = 0;
  std::int64_t max = 0;
  double mean = 0;
  double median = 0;
  std::int64_t mode = 0;  // smallest of the most frequent values
  std::vector<std::int64_t> values;

  std::int64_t mean_rounded() const;  // half-up
};

// Throws ValidationError("no issues") on empty input.
MetricStats metric_stats(std::vector<std::int64_t> values);

struct DescriptiveStats {
  std::size_t issues = 0;
  MetricStats contributors;
  std::optional<MetricStats> resolution_days;  // absent when nothing resolved
  MetricStats comments;
};

DescriptiveStats descriptive_stats(std::span<const IssueReport> issues);

}  // namespace privlens::corpus

#endif  // PRIVLENS_CORPUS_HPP_
