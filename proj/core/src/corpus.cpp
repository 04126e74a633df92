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

#include "privlens/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "privlens/error.hpp"
#include "privlens/json_io.hpp"
#include "text_util.hpp"

namespace privlens::corpus {

namespace {

using nlohmann::json;
using namespace std::chrono;

constexpr std::int64_t kSecondsPerDay = 86400;

bool read_int(std::string_view text, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > text.size()) return false;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + digits, out);
  if (ec != std::errc{} || ptr != text.data() + pos + digits) return false;
  pos += digits;
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

std::optional<std::uint32_t> parse_count(std::string_view text) {
  text = detail::trim(text);
  if (text.empty()) return std::nullopt;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool all_digits(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// ISO-8601 or seconds since the epoch.
Timestamp parse_flexible_time(std::string_view text) {
  text = detail::trim(text);
  if (all_digits(text)) {
    long long seconds = 0;
    std::from_chars(text.data(), text.data() + text.size(), seconds);
    return Timestamp{std::chrono::seconds{seconds}};
  }
  return parse_timestamp(text);
}

std::string project_default(const IngestOptions& options, std::string_view fallback) {
  return options.project.empty() ? std::string(fallback) : options.project;
}

void check_resolution(const IssueReport& issue) {
  if (issue.resolved && *issue.resolved < issue.created) {
    throw ValidationError("resolved before created");
  }
  if (issue.contributors < 1) throw ValidationError("contributors must be at least 1");
}

// Monorail CSV column aliases, matched case-insensitively.
enum class Column {
  kId, kProject, kTitle, kDescription, kType, kStatus, kComponents, kCreated, kResolved,
  kContributors, kComments, kExtra
};

Column classify_column(const std::string& header) {
  const std::string h = detail::lower(detail::trim(header));
  if (h == "id" || h == "issue_id" || h == "local id") return Column::kId;
  if (h == "project") return Column::kProject;
  if (h == "summary" || h == "title") return Column::kTitle;
  if (h == "description") return Column::kDescription;
  if (h == "type") return Column::kType;
  if (h == "status") return Column::kStatus;
  if (h == "component" || h == "components") return Column::kComponents;
  if (h == "openedtimestamp" || h == "opened" || h == "created") return Column::kCreated;
  if (h == "closedtimestamp" || h == "closed" || h == "resolved") return Column::kResolved;
  if (h == "contributors") return Column::kContributors;
  if (h == "comments" || h == "commentcount") return Column::kComments;
  return Column::kExtra;
}

IngestResult ingest_monorail(std::istream& in, const IngestOptions& options) {
  IngestResult result;
  auto rows = parse_csv(in);
  if (rows.empty()) return result;
  const auto& header = rows.front();
  std::vector<Column> columns;
  std::map<Column, std::size_t> first;
  for (std::size_t i = 0; i < header.size(); ++i) {
    Column c = classify_column(header[i]);
    // Later aliases of an already mapped field stay in extras.
    if (c != Column::kExtra && !first.emplace(c, i).second) c = Column::kExtra;
    columns.push_back(c);
  }
  if (!first.contains(Column::kId)) throw ParseError("no ID column in Monorail header", 1);
  if (!first.contains(Column::kCreated)) throw ParseError("no Opened column in Monorail header", 1);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && detail::trim(row[0]).empty()) continue;
    const std::string where = "record " + std::to_string(r);
    if (row.size() != header.size()) {
      ++result.skipped;
      result.warnings.push_back(where + ": " + std::to_string(row.size()) + " fields, header has " +
                                std::to_string(header.size()));
      continue;
    }
    try {
      IssueReport issue;
      issue.project = project_default(options, "chromium");
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::string& v = row[i];
        switch (columns[i]) {
          case Column::kId: issue.issue_id = std::string(detail::trim(v)); break;
          case Column::kProject:
            if (!detail::trim(v).empty()) issue.project = std::string(detail::trim(v));
            break;
          case Column::kTitle: issue.title = v; break;
          case Column::kDescription: issue.description = v; break;
          case Column::kType: issue.issue_type = normalize_issue_type(v); break;
          case Column::kStatus: issue.status = std::string(detail::trim(v)); break;
          case Column::kComponents:
            for (auto& part : detail::split_trimmed(v, ','))
              for (auto& c : detail::split_trimmed(part, ';')) issue.components.push_back(c);
            break;
          case Column::kCreated: issue.created = parse_flexible_time(v); break;
          case Column::kResolved:
            if (!detail::trim(v).empty() && detail::trim(v) != "0") {
              issue.resolved = parse_flexible_time(v);
            }
            break;
          case Column::kContributors: {
            auto n = parse_count(v);
            if (!n) throw ValidationError("contributors '" + v + "' is not a count");
            issue.contributors = *n;
            break;
          }
          case Column::kComments: {
            auto n = parse_count(v);
            if (!n) throw ValidationError("comments '" + v + "' is not a count");
            issue.comments = *n;
            break;
          }
          case Column::kExtra:
            if (!v.empty()) issue.extras[header[i]] = v;
            break;
        }
      }
      if (issue.issue_id.empty()) throw ValidationError("empty ID");
      check_resolution(issue);
      result.issues.push_back(std::move(issue));
    } catch (const Error& e) {
      ++result.skipped;
      result.warnings.push_back(where + ": " + e.what());
    }
  }
  return result;
}

// Plain text of a string or an Atlassian document node.
std::string jira_text(const json& node) {
  if (node.is_string()) return node.get<std::string>();
  if (!node.is_object()) return {};
  std::string out;
  if (node.contains("text") && node["text"].is_string()) out += node["text"].get<std::string>();
  if (node.contains("content") && node["content"].is_array()) {
    for (const auto& child : node["content"]) {
      out += jira_text(child);
      const std::string type = child.value("type", "");
      if (type == "paragraph" || type == "codeBlock" || type == "heading") out += '\n';
    }
  }
  return out;
}

// Block nodes end with a newline; the last one is not content.
std::string jira_block_text(const json& node) {
  std::string out = jira_text(node);
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string jira_person(const json& node) {
  if (!node.is_object()) return {};
  for (const char* key : {"accountId", "name", "key", "emailAddress", "displayName"}) {
    if (node.contains(key) && node[key].is_string()) return node[key].get<std::string>();
  }
  return {};
}

std::string scalar_text(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

IssueReport jira_issue(const json& raw, const IngestOptions& options) {
  IssueReport issue;
  if (!raw.is_object()) throw ValidationError("issue is not an object");
  if (!raw.contains("key") || !raw["key"].is_string()) throw ValidationError("missing key");
  issue.issue_id = raw["key"].get<std::string>();
  const json fields = raw.value("fields", json::object());
  issue.project = project_default(options, "jira");
  if (fields.contains("project") && fields["project"].is_object() &&
      fields["project"].contains("key")) {
    issue.project = fields["project"]["key"].get<std::string>();
  }
  static const std::set<std::string> mapped = {
      "summary", "description", "issuetype", "status", "components", "created",
      "resolutiondate", "comment", "reporter", "assignee", "project", "contributors"};
  issue.title = fields.contains("summary") ? jira_text(fields["summary"]) : "";
  issue.description = fields.contains("description") ? jira_block_text(fields["description"]) : "";
  if (fields.contains("issuetype") && fields["issuetype"].is_object()) {
    issue.issue_type = normalize_issue_type(fields["issuetype"].value("name", ""));
  }
  if (fields.contains("status") && fields["status"].is_object()) {
    issue.status = fields["status"].value("name", "");
  }
  if (fields.contains("components") && fields["components"].is_array()) {
    for (const auto& c : fields["components"]) {
      if (c.is_object() && c.contains("name")) issue.components.push_back(c["name"].get<std::string>());
    }
  }
  if (!fields.contains("created") || !fields["created"].is_string()) {
    throw ValidationError("missing created");
  }
  issue.created = parse_timestamp(fields["created"].get<std::string>());
  if (fields.contains("resolutiondate") && fields["resolutiondate"].is_string()) {
    issue.resolved = parse_timestamp(fields["resolutiondate"].get<std::string>());
  }
  std::set<std::string> people;
  for (const char* key : {"reporter", "assignee"}) {
    if (fields.contains(key)) {
      auto who = jira_person(fields[key]);
      if (!who.empty()) people.insert(who);
    }
  }
  if (fields.contains("comment") && fields["comment"].is_object()) {
    const auto& comment = fields["comment"];
    if (comment.contains("comments") && comment["comments"].is_array()) {
      for (const auto& c : comment["comments"]) {
        auto who = jira_person(c.value("author", json::object()));
        if (!who.empty()) people.insert(who);
      }
      issue.comments = static_cast<std::uint32_t>(comment["comments"].size());
    }
    if (comment.contains("total") && comment["total"].is_number_unsigned()) {
      issue.comments = comment["total"].get<std::uint32_t>();
    }
  }
  if (fields.contains("contributors") && fields["contributors"].is_number_unsigned()) {
    issue.contributors = fields["contributors"].get<std::uint32_t>();
  } else {
    issue.contributors = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(people.size()));
  }
  for (const auto& [key, value] : fields.items()) {
    if (mapped.contains(key) || value.is_null()) continue;
    issue.extras[key] = scalar_text(value);
  }
  for (const auto& [key, value] : raw.items()) {
    if (key == "key" || key == "fields" || value.is_null()) continue;
    issue.extras[key] = scalar_text(value);
  }
  check_resolution(issue);
  return issue;
}

IngestResult ingest_jira(std::istream& in, const IngestOptions& options) {
  IngestResult result;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (detail::trim(text).empty()) return result;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid Jira JSON: ") + e.what(), 0);
  }
  const json* issues = &doc;
  if (doc.is_object()) {
    if (!doc.contains("issues") || !doc["issues"].is_array()) {
      throw ParseError("Jira export has no issues array");
    }
    issues = &doc["issues"];
  } else if (!doc.is_array()) {
    throw ParseError("Jira export must be an object or an array");
  }
  std::size_t index = 0;
  for (const auto& raw : *issues) {
    ++index;
    try {
      result.issues.push_back(jira_issue(raw, options));
    } catch (const Error& e) {
      ++result.skipped;
      result.warnings.push_back("record " + std::to_string(index) + ": " + e.what());
    }
  }
  return result;
}

IngestResult ingest_canonical(std::istream& in, const IngestOptions& options) {
  IngestResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    try {
      IssueReport issue = issue_from_json(j);
      if (issue.project.empty()) issue.project = options.project;
      check_resolution(issue);
      result.issues.push_back(std::move(issue));
    } catch (const Error& e) {
      ++result.skipped;
      result.warnings.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return result;
}

bool stack_like(const std::string& line) {
  static const std::vector<std::regex> patterns = {
      std::regex(R"(^\s*at\s+[\w$.<>]+\(.*\)\s*$)"),
      std::regex(R"(^\s*#\d+\s+0x[0-9a-fA-F]+)"),
      std::regex(R"(0x[0-9a-fA-F]{6,})"),
      std::regex(R"(_Z[A-Za-z0-9_]{4,})"),
      std::regex(R"(^\s*File ".*", line \d+)"),
      std::regex(R"(^\s*\S+\.(cc|cpp|c|h|java|js|py|php|rs|go):\d+)"),
  };
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::regex& re) { return std::regex_search(line, re); });
}

}  // namespace

Timestamp parse_timestamp(std::string_view raw) {
  const std::string_view text = detail::trim(raw);
  const auto fail = [&] { return ParseError("invalid timestamp '" + std::string(text) + "'"); };
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, pos, 4, y) || !expect(text, pos, '-') || !read_int(text, pos, 2, mo) ||
      !expect(text, pos, '-') || !read_int(text, pos, 2, d)) {
    throw fail();
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw fail();
  std::int64_t offset = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') throw fail();
    ++pos;
    if (!read_int(text, pos, 2, h) || !expect(text, pos, ':') || !read_int(text, pos, 2, mi)) {
      throw fail();
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_int(text, pos, 2, s)) throw fail();
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw fail();
      }
    }
    if (h > 23 || mi > 59 || s > 60) throw fail();
    if (pos < text.size()) {
      if (text[pos] == 'Z') {
        ++pos;
      } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        int oh = 0, om = 0;
        if (!read_int(text, pos, 2, oh)) throw fail();
        if (pos < text.size() && text[pos] == ':') ++pos;
        if (!read_int(text, pos, 2, om)) throw fail();
        offset = sign * (oh * 3600 + om * 60);
      } else {
        throw fail();
      }
    }
    if (pos != text.size()) throw fail();
  }
  return Timestamp{sys_days{ymd}.time_since_epoch()} + hours{h} + minutes{mi} + seconds{s} -
         seconds{offset};
}

std::string format_timestamp(Timestamp ts) {
  const auto days = floor<std::chrono::days>(ts);
  const year_month_day ymd{days};
  const hh_mm_ss<seconds> tod{ts - days};
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  return buf;
}

std::int64_t resolution_days(Timestamp created, Timestamp resolved) {
  const std::int64_t secs = (resolved - created).count();
  std::int64_t days = secs / kSecondsPerDay;
  if (secs % kSecondsPerDay != 0 && secs < 0) --days;
  return std::max<std::int64_t>(1, days);
}

std::optional<std::int64_t> IssueReport::resolution_days() const {
  if (!resolved) return std::nullopt;
  return corpus::resolution_days(created, *resolved);
}

std::string normalize_issue_type(std::string_view text) {
  std::string out;
  for (char c : detail::trim(text)) {
    if (c == ' ' || c == '_' || c == '-') {
      if (!out.empty() && out.back() != '-') out += '-';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

const std::vector<std::string>& known_issue_types(std::string_view project) {
  static const std::vector<std::string> chrome = {"bug",     "bug-regression", "bug-security",
                                                  "feature", "task",           "unspecified"};
  static const std::vector<std::string> moodle = {"bug",  "epic",     "improvement",    "new-feature",
                                                  "task", "sub-task", "functional-test"};
  static const std::vector<std::string> none;
  const std::string p = detail::lower(project);
  if (p == "chrome" || p == "chromium") return chrome;
  if (p == "moodle" || p == "mdl") return moodle;
  return none;
}

std::string_view to_string(ExportFormat format) {
  switch (format) {
    case ExportFormat::kMonorailCsv: return "monorail-csv";
    case ExportFormat::kJiraJson: return "jira-json";
    case ExportFormat::kCanonical: return "canonical-json";
  }
  return "?";
}

std::optional<ExportFormat> parse_format(std::string_view text) {
  for (auto f : {ExportFormat::kMonorailCsv, ExportFormat::kJiraJson, ExportFormat::kCanonical})
    if (to_string(f) == text) return f;
  if (text == "canonical") return ExportFormat::kCanonical;
  return std::nullopt;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;      // inside quotes
  bool was_quoted = false;  // field closed a quote; only a separator may follow
  bool any = false;         // current record has content
  std::size_t record = 1;
  char c;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    any = false;
    ++record;
  };
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
          was_quoted = true;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == ',') {
      end_field();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      if (any || !field.empty() || was_quoted || !row.empty()) {
        end_record();
      }
    } else if (was_quoted) {
      throw ParseError("unexpected character after closing quote", record);
    } else if (c == '"') {
      if (!field.empty()) throw ParseError("quote inside unquoted field", record);
      quoted = true;
      any = true;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", record);
  if (any || !field.empty() || was_quoted || !row.empty()) end_record();
  return rows;
}

IngestResult ingest(std::istream& in, ExportFormat format, const IngestOptions& options) {
  switch (format) {
    case ExportFormat::kMonorailCsv: return ingest_monorail(in, options);
    case ExportFormat::kJiraJson: return ingest_jira(in, options);
    case ExportFormat::kCanonical: return ingest_canonical(in, options);
  }
  throw ParseError("unknown export format");
}

IngestResult ingest_file(const std::filesystem::path& path, ExportFormat format,
                         const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest(in, format, options);
}

void write_canonical(std::ostream& out, std::span<const IssueReport> issues) {
  for (const auto& issue : issues) {
    json j = issue;
    out << j.dump() << '\n';
  }
}

std::vector<IssueReport> load_corpus_file(const std::filesystem::path& path) {
  auto result = ingest_file(path, ExportFormat::kCanonical);
  if (result.skipped) {
    throw ValidationError(result.warnings);
  }
  return std::move(result.issues);
}

std::vector<IssueReport> filter_privacy_tagged(std::span<const IssueReport> issues,
                                               const std::set<std::string>& statuses,
                                               std::string_view tag) {
  std::set<std::string> allowed;
  for (const auto& s : statuses) allowed.insert(detail::lower(s));
  const std::string t = detail::lower(tag);
  std::vector<IssueReport> out;
  for (const auto& issue : issues) {
    const bool tagged = std::any_of(issue.components.begin(), issue.components.end(),
                                    [&](const std::string& c) {
                                      const std::string lc = detail::lower(c);
                                      return lc == t || lc.rfind(t + ">", 0) == 0;
                                    });
    if (tagged && (allowed.empty() || allowed.contains(detail::lower(issue.status)))) {
      out.push_back(issue);
    }
  }
  return out;
}

std::vector<IssueReport> apply_exclusions(std::span<const IssueReport> issues,
                                          const std::set<std::string>& excluded_ids) {
  std::vector<IssueReport> out;
  for (const auto& issue : issues)
    if (!excluded_ids.contains(issue.issue_id)) out.push_back(issue);
  return out;
}

std::size_t content_tokens(std::string_view description) {
  std::istringstream in{std::string(description)};
  std::string line;
  bool in_fence = false;
  bool in_jira_block = false;
  std::size_t tokens = 0;
  static const std::regex jira_block(R"(\{(code|noformat)(:[^}]*)?\})");
  while (std::getline(in, line)) {
    const std::string_view t = detail::trim(line);
    if (t.rfind("```", 0) == 0) {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;
    // Toggle once per {code}/{noformat} marker; text outside markers counts.
    std::string kept;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), jira_block);
         it != std::sregex_iterator(); ++it) {
      if (!in_jira_block) kept += line.substr(last, static_cast<std::size_t>(it->position()) - last);
      in_jira_block = !in_jira_block;
      last = static_cast<std::size_t>(it->position() + it->length());
    }
    if (!in_jira_block) kept += line.substr(last);
    if (kept.empty() || stack_like(kept)) continue;
    std::size_t i = 0;
    while (i < kept.size()) {
      while (i < kept.size() && !std::isalnum(static_cast<unsigned char>(kept[i]))) ++i;
      bool letter = false;
      while (i < kept.size() &&
             (std::isalnum(static_cast<unsigned char>(kept[i])) || kept[i] == '\'')) {
        letter = letter || std::isalpha(static_cast<unsigned char>(kept[i]));
        ++i;
      }
      if (letter) ++tokens;
    }
  }
  return tokens;
}

bool flag_low_information(const IssueReport& issue, std::size_t min_content_tokens) {
  return content_tokens(issue.description) < min_content_tokens;
}

std::int64_t MetricStats::mean_rounded() const {
  if (values.empty()) return 0;
  std::int64_t sum = 0;
  for (auto v : values) sum += v;
  const auto n = static_cast<std::int64_t>(values.size());
  // floor((2*sum + n) / (2n)) is round-half-up of sum/n.
  const std::int64_t num = 2 * sum + n, den = 2 * n;
  std::int64_t q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

MetricStats metric_stats(std::vector<std::int64_t> values) {
  if (values.empty()) throw ValidationError("no issues");
  MetricStats m;
  std::sort(values.begin(), values.end());
  m.min = values.front();
  m.max = values.back();
  long double sum = 0;
  for (auto v : values) sum += static_cast<long double>(v);
  m.mean = static_cast<double>(sum / static_cast<long double>(values.size()));
  const std::size_t n = values.size();
  m.median = n % 2 ? static_cast<double>(values[n / 2])
                   : (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2])) / 2.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[j] == values[i]) ++j;
    if (j - i > best) {  // strict: the smallest value keeps a tie
      best = j - i;
      m.mode = values[i];
    }
    i = j;
  }
  m.values = std::move(values);
  return m;
}

DescriptiveStats descriptive_stats(std::span<const IssueReport> issues) {
  if (issues.empty()) throw ValidationError("no issues");
  std::vector<std::int64_t> contributors, days, comments;
  for (const auto& issue : issues) {
    contributors.push_back(issue.contributors);
    comments.push_back(issue.comments);
    if (auto d = issue.resolution_days()) days.push_back(*d);
  }
  DescriptiveStats out;
  out.issues = issues.size();
  out.contributors = metric_stats(std::move(contributors));
  out.comments = metric_stats(std::move(comments));
  if (!days.empty()) out.resolution_days = metric_stats(std::move(days));
  return out;
}

void to_json(json& j, const IssueReport& issue) {
  j = json::object();
  j["project"] = issue.project;
  j["issue"] = issue.issue_id;
  j["title"] = issue.title;
  j["description"] = issue.description;
  j["type"] = issue.issue_type;
  j["status"] = issue.status;
  j["components"] = issue.components;
  j["created"] = format_timestamp(issue.created);
  j["resolved"] = issue.resolved ? json(format_timestamp(*issue.resolved)) : json(nullptr);
  j["contributors"] = issue.contributors;
  j["comments"] = issue.comments;
  j["extras"] = issue.extras;
}

IssueReport issue_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("issue record must be an object");
  IssueReport issue;
  auto str = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw ParseError(std::string("missing ") + key, 0, key);
      return {};
    }
    if (!j[key].is_string()) throw ParseError(std::string(key) + " must be a string", 0, key);
    return j[key].get<std::string>();
  };
  auto count = [&](const char* key, std::uint32_t fallback) -> std::uint32_t {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (!j[key].is_number_unsigned()) {
      throw ParseError(std::string(key) + " must be a non-negative integer", 0, key);
    }
    return j[key].get<std::uint32_t>();
  };
  issue.project = str("project", false);
  issue.issue_id = str("issue", true);
  issue.title = str("title", false);
  issue.description = str("description", false);
  issue.issue_type = str("type", false);
  issue.status = str("status", false);
  if (j.contains("components") && !j["components"].is_null()) {
    if (!j["components"].is_array()) throw ParseError("components must be an array", 0, "components");
    for (const auto& c : j["components"]) {
      if (!c.is_string()) throw ParseError("components must be strings", 0, "components");
      issue.components.push_back(c.get<std::string>());
    }
  }
  issue.created = parse_timestamp(str("created", true));
  const std::string resolved = str("resolved", false);
  if (!resolved.empty()) issue.resolved = parse_timestamp(resolved);
  issue.contributors = count("contributors", 1);
  issue.comments = count("comments", 0);
  if (j.contains("extras") && j["extras"].is_object()) {
    for (const auto& [k, v] : j["extras"].items()) issue.extras[k] = scalar_text(v);
  }
  return issue;
}

void to_json(json& j, const MetricStats& stats) {
  j = json{{"min", stats.min},       {"max", stats.max},   {"mean", stats.mean},
           {"mean_rounded", stats.mean_rounded()}, {"median", stats.median}, {"mode", stats.mode},
           {"n", stats.values.size()}};
}

void to_json(json& j, const DescriptiveStats& stats) {
  j = json{{"issues", stats.issues},
           {"contributors", stats.contributors},
           {"resolution_days", stats.resolution_days ? json(*stats.resolution_days) : json(nullptr)},
           {"comments", stats.comments}};
}

}  // namespace privlens::corpus
