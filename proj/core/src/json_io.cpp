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

#include "privlens/json_io.hpp"

#include "privlens/error.hpp"

namespace privlens {

using nlohmann::json;

namespace {

std::string req_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ParseError(std::string("missing string field '") + key + "'", 0, key);
  }
  return j[key].get<std::string>();
}

std::string opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) throw ParseError(std::string(key) + " must be a string", 0, key);
  return j[key].get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key) || j[key].is_null()) return out;
  if (!j[key].is_array()) throw ParseError(std::string(key) + " must be an array", 0, key);
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ParseError(std::string(key) + " must hold strings", 0, key);
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

json labels_json(const LabelSet& labels) { return to_strings(labels); }

LabelSet labels_from_json(const json& value) {
  if (!value.is_array()) throw ParseError("labels must be an array of requirement ids");
  LabelSet out;
  for (const auto& v : value) {
    if (!v.is_string()) throw ParseError("labels must be strings");
    out.insert(RequirementId::parse(v.get<std::string>()));
  }
  return out;
}

void to_json(json& j, const GoldEntry& e) {
  j = json{{"project", e.project},
           {"issue", e.issue_id},
           {"labels", labels_json(e.labels)},
           {"resolution", to_string(e.resolution)}};
  if (e.issue_type) j["type"] = *e.issue_type;
}

namespace taxonomy {

json trace_json(const TraceBySource& trace) {
  json j = json::object();
  for (const auto& [source, locators] : trace) j[std::string(to_string(source))] = locators;
  return j;
}

void to_json(json& j, const Requirement& r) {
  std::vector<std::string> cats, refs;
  for (const auto& c : r.categories) cats.push_back(c.str());
  for (const auto& ref : r.refs) refs.push_back(ref.str());
  j = json{{"id", r.id.str()},        {"action", to_string(r.action)}, {"object", r.object},
           {"target", r.target},      {"text", r.text()},              {"categories", cats},
           {"refs", refs}};
}

void to_json(json& j, const Taxonomy& t) {
  json cats = json::array();
  for (const auto& node : t.tree().categories()) {
    cats.push_back({{"id", node.id},
                    {"title", node.title},
                    {"subcategories", node.subcategories},
                    {"requirements", t.category_count(node.id)}});
  }
  j = json{{"version", t.version()}, {"categories", cats}, {"requirements", t.requirements()}};
}

void to_json(json& j, const TraceReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"id", e.id.str()}, {"text", e.text}, {"refs", trace_json(e.refs)}});
  }
  j = json{{"issue", report.issue_id}, {"requirements", entries},
           {"sources", trace_json(report.sources())}};
}

}  // namespace taxonomy

namespace refine {

void to_json(json& j, const MergedRequirement& m) {
  std::vector<std::string> prov;
  for (const auto& r : m.provenance) prov.push_back(r.str());
  j = json{{"text", m.text()},       {"action", to_string(m.action)}, {"object", m.object},
           {"target", m.target},     {"goal_key", m.goal_key},       {"provenance", prov},
           {"needs_review", m.needs_review}};
}

void to_json(json& j, const PipelineAudit& a) {
  json shortlisted = json::object(), identified = json::object();
  for (const auto& [s, n] : a.shortlisted) shortlisted[std::string(to_string(s))] = n;
  for (const auto& [s, n] : a.identified) identified[std::string(to_string(s))] = n;
  j = json{{"shortlisted", shortlisted},
           {"shortlisted_total", a.total_shortlisted()},
           {"identified", identified},
           {"identified_total", a.total_identified()},
           {"merged_away", a.merged_away},
           {"final", a.final_count}};
}

void to_json(json& j, const InconsistencyReport& r) {
  j = json{{"constraint", r.constraint},
           {"goal_key", r.first.goal_key},
           {"first", {{"ref", r.first.source_ref.str()}, {"polarity", r.first.polarity->str()}}},
           {"second", {{"ref", r.second.source_ref.str()}, {"polarity", r.second.polarity->str()}}}};
}

}  // namespace refine

namespace irr {

void to_json(json& j, const ReliabilityResult& r) {
  j = json{{"statistic", to_string(r.statistic)}, {"value", r.value}, {"n_units", r.n_units},
           {"n_skipped", r.n_skipped},            {"degenerate", r.degenerate}};
}

void to_json(json& j, const ConfidenceInterval& ci) {
  j = json{{"lower", ci.lower},
           {"upper", ci.upper},
           {"level", ci.level},
           {"iterations", ci.iterations},
           {"degenerate_replicates", ci.degenerate_replicates}};
}

}  // namespace irr

namespace stats {

void to_json(json& j, const TestResult& r) {
  j = json{{"u", r.u},
           {"p_value", r.p_value},
           {"alternative", to_string(r.alternative)},
           {"rbc", r.rbc},
           {"cles", r.cles},
           {"directional_cles", r.directional_cles()},
           {"method", to_string(r.method)},
           {"n1", r.n1},
           {"n2", r.n2}};
}

void to_json(json& j, const CoverageTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"category", r.category},
                    {"title", r.title},
                    {"requirements", r.requirements},
                    {"issues", r.issues},
                    {"percentage", r.percentage}});
  }
  j = json{{"total_issues", t.total_issues}, {"rows", rows}};
}

namespace {
json rank_json(const std::vector<RankEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"id", e.id.str()}, {"count", e.count}});
  return out;
}
}  // namespace

void to_json(json& j, const Ranking& r) {
  j = json{{"overall", rank_json(r.overall)}};
  if (!r.by_type.empty()) {
    json types = json::object();
    for (const auto& [type, entries] : r.by_type) types[type] = rank_json(entries);
    j["by_type"] = types;
  }
}

}  // namespace stats

namespace workflow {

void to_json(json& j, const Session& s) {
  json assignment = json::object();
  for (const auto& [issue, coders] : s.assignment) assignment[issue] = coders;
  j = json{{"id", s.id},
           {"project", s.project},
           {"corpus_ref", s.corpus_ref},
           {"taxonomy_version", s.taxonomy_version},
           {"coders", s.coders},
           {"issues", s.issues},
           {"issue_types", s.issue_types},
           {"assignment", assignment},
           {"state", to_string(s.state)},
           {"created_at", s.created_at}};
}

Session session_from_json(const json& j) {
  Session s;
  s.id = req_string(j, "id");
  s.project = opt_string(j, "project");
  s.corpus_ref = opt_string(j, "corpus_ref");
  s.taxonomy_version = opt_string(j, "taxonomy_version");
  s.coders = string_list(j, "coders");
  s.issues = string_list(j, "issues");
  if (j.contains("issue_types") && j["issue_types"].is_object()) {
    for (const auto& [k, v] : j["issue_types"].items()) s.issue_types[k] = v.get<std::string>();
  }
  if (!j.contains("assignment") || !j["assignment"].is_object()) {
    throw ParseError("missing assignment", 0, "assignment");
  }
  for (const auto& [issue, coders] : j["assignment"].items()) {
    auto& set = s.assignment[issue];
    for (const auto& c : coders) set.insert(c.get<std::string>());
  }
  auto state = parse_state(opt_string(j, "state").empty() ? "open" : opt_string(j, "state"));
  if (!state) throw ParseError("unknown session state", 0, "state");
  s.state = *state;
  s.created_at = opt_string(j, "created_at");
  return s;
}

void to_json(json& j, const LabelRecord& r) {
  j = json{{"session", r.session_id}, {"issue", r.issue_id},         {"coder", r.coder_id},
           {"labels", labels_json(r.labels)}, {"submitted_at", r.submitted_at},
           {"version", r.version}};
}

LabelRecord label_record_from_json(const json& j) {
  LabelRecord r;
  r.session_id = req_string(j, "session");
  r.issue_id = req_string(j, "issue");
  r.coder_id = req_string(j, "coder");
  r.labels = labels_from_json(j.at("labels"));
  r.submitted_at = opt_string(j, "submitted_at");
  if (!j.contains("version") || !j["version"].is_number_unsigned()) {
    throw ParseError("missing version", 0, "version");
  }
  r.version = j["version"].get<std::uint64_t>();
  return r;
}

void to_json(json& j, const FinalLabel& f) {
  j = json{{"issue", f.issue_id},
           {"labels", labels_json(f.labels)},
           {"resolution", to_string(f.resolution)},
           {"adjudicators", f.adjudicators},
           {"note", f.note},
           {"decided_at", f.decided_at}};
}

FinalLabel final_label_from_json(const json& j) {
  FinalLabel f;
  f.issue_id = req_string(j, "issue");
  f.labels = labels_from_json(j.at("labels"));
  auto resolution = parse_resolution(req_string(j, "resolution"));
  if (!resolution) throw ParseError("unknown resolution", 0, "resolution");
  f.resolution = *resolution;
  f.adjudicators = string_list(j, "adjudicators");
  f.note = opt_string(j, "note");
  f.decided_at = opt_string(j, "decided_at");
  return f;
}

void to_json(json& j, const Disagreement& d) {
  json sets = json::object();
  for (const auto& [coder, labels] : d.sets) sets[coder] = labels_json(labels);
  j = json{{"issue", d.issue_id}, {"sets", sets}, {"masi_distance", d.masi_distance}};
}

void to_json(json& j, const DisagreementReport& r) {
  json pending = json::array();
  for (const auto& p : r.pending) pending.push_back({{"issue", p.issue_id}, {"missing", p.missing_coders}});
  j = json{{"disagreements", r.disagreements}, {"unanimous", r.unanimous}, {"pending", pending}};
}

}  // namespace workflow

}  // namespace privlens
