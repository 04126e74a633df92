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

#include "privlens/workflow.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <shared_mutex>

#include <nlohmann/json.hpp>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"
#include "privlens/json_io.hpp"
#include "text_util.hpp"

namespace privlens::workflow {

namespace {

using nlohmann::json;

bool all_equal(std::span<const LabelSet> sets) {
  return std::adjacent_find(sets.begin(), sets.end(), std::not_equal_to<>()) == sets.end();
}

std::string utc_now() {
  return corpus::format_timestamp(
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string join_names(const std::vector<std::string>& names) { return detail::join(names, ", "); }

}  // namespace

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::kOpen: return "open";
    case SessionState::kAdjudicating: return "adjudicating";
    case SessionState::kFinalized: return "finalized";
  }
  return "?";
}

std::optional<SessionState> parse_state(std::string_view text) {
  for (auto s : {SessionState::kOpen, SessionState::kAdjudicating, SessionState::kFinalized})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::string_view to_string(AssignmentScheme scheme) {
  return scheme == AssignmentScheme::kSplitHalf ? "split-half" : "k-of-n";
}

std::optional<AssignmentScheme> parse_scheme(std::string_view text) {
  if (text == "split-half") return AssignmentScheme::kSplitHalf;
  if (text == "k-of-n") return AssignmentScheme::kKOfN;
  return std::nullopt;
}

Assignment assign(std::span<const std::string> issues, std::span<const std::string> coders,
                  const AssignmentPolicy& policy) {
  if (coders.size() < 2) throw ConfigError("at least 2 coders are required");
  if (std::set<std::string>(coders.begin(), coders.end()).size() != coders.size()) {
    throw ConfigError("coder ids must be distinct");
  }
  if (issues.empty()) throw ValidationError("cannot assign an empty corpus");
  if (std::set<std::string>(issues.begin(), issues.end()).size() != issues.size()) {
    throw ValidationError("issue ids must be distinct");
  }
  Assignment out;
  const std::size_t n = issues.size();
  if (policy.scheme == AssignmentScheme::kSplitHalf) {
    if (coders.size() != 3) {
      throw ConfigError("the default scheme needs exactly 3 coders, got " +
                        std::to_string(coders.size()));
    }
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n; ++i) out[issues[i]] = {coders[0], coders[i < half ? 1 : 2]};
    return out;
  }
  if (policy.k < 2 || policy.k > coders.size()) {
    throw ConfigError("k must be between 2 and the number of coders");
  }
  // Deal n*k slots round-robin: loads differ by at most one, and k <= |coders|
  // consecutive slots never repeat a coder.
  for (std::size_t i = 0; i < n; ++i) {
    auto& set = out[issues[i]];
    for (std::size_t j = 0; j < policy.k; ++j) set.insert(coders[(i * policy.k + j) % coders.size()]);
  }
  return out;
}

std::vector<std::string> Session::issues_for(std::string_view coder) const {
  std::vector<std::string> out;
  for (const auto& issue : issues) {
    auto it = assignment.find(issue);
    if (it != assignment.end() && it->second.contains(std::string(coder))) out.push_back(issue);
  }
  return out;
}

Resolution classify_resolution(std::span<const LabelSet> coder_sets, const LabelSet& final_labels) {
  if (!coder_sets.empty() && all_equal(coder_sets) && final_labels == coder_sets.front()) {
    return Resolution::kUnanimous;
  }
  LabelSet uni;
  for (const auto& s : coder_sets) uni.insert(s.begin(), s.end());
  if (!all_equal(coder_sets) && final_labels == uni) return Resolution::kCombined;
  return Resolution::kReclassified;
}

DisagreementReport SessionSnapshot::disagreements() const {
  DisagreementReport report;
  for (const auto& issue : session.issues) {
    const auto& coders = session.assignment.at(issue);
    auto labelled = latest.find(issue);
    PendingIssue pending{issue, {}};
    std::map<std::string, LabelSet> sets;
    for (const auto& coder : coders) {
      if (labelled == latest.end() || !labelled->second.contains(coder)) {
        pending.missing_coders.push_back(coder);
      } else {
        sets[coder] = labelled->second.at(coder).labels;
      }
    }
    if (!pending.missing_coders.empty()) {
      report.pending.push_back(std::move(pending));
      continue;
    }
    std::vector<LabelSet> values;
    for (const auto& [_, s] : sets) values.push_back(s);
    if (all_equal(values)) {
      report.unanimous.push_back(issue);
      continue;
    }
    double worst = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = i + 1; j < values.size(); ++j)
        worst = std::max(worst, irr::masi_distance(values[i], values[j]));
    report.disagreements.push_back({issue, std::move(sets), worst});
  }
  return report;
}

double SessionSnapshot::percent_total_agreement() const {
  auto report = disagreements();
  if (!report.pending.empty()) {
    std::vector<std::string> ids;
    for (const auto& p : report.pending) ids.push_back(p.issue_id);
    throw StateError("issues still pending: " + join_names(ids));
  }
  if (session.issues.empty()) return 0;
  return static_cast<double>(report.unanimous.size()) / static_cast<double>(session.issues.size());
}

irr::LabeledUnits SessionSnapshot::units() const {
  irr::LabeledUnits units;
  for (const auto& issue : session.issues) {
    auto it = latest.find(issue);
    if (it == latest.end()) continue;
    irr::Unit unit{issue, {}};
    for (const auto& [coder, record] : it->second) unit.labelings.push_back({coder, record.labels});
    units.push_back(std::move(unit));
  }
  return units;
}

struct WorkflowStore::Impl {
  struct SessionData {
    Session session;
    // issue -> coder -> versions, oldest first
    std::map<std::string, std::map<std::string, std::vector<LabelRecord>>> labels;
    // issue -> decisions, oldest first
    std::map<std::string, std::vector<FinalLabel>> finals;
  };

  std::shared_ptr<const taxonomy::Taxonomy> taxonomy;
  std::filesystem::path path;
  std::ofstream journal;
  Clock clock;
  mutable std::shared_mutex mutex;
  std::map<std::string, SessionData> sessions;
  std::vector<std::string> order;
  std::uint64_t seq = 0;

  SessionData& find(std::string_view id) {
    auto it = sessions.find(std::string(id));
    if (it == sessions.end()) throw NotFoundError("no session " + std::string(id));
    return it->second;
  }
  const SessionData& find(std::string_view id) const {
    return const_cast<Impl*>(this)->find(id);
  }

  static void require_issue(const SessionData& data, std::string_view issue) {
    if (!data.session.assignment.contains(std::string(issue))) {
      throw NotFoundError("issue " + std::string(issue) + " is not in session " + data.session.id);
    }
  }

  void check_labels(const LabelSet& labels) const {
    std::vector<std::string> unknown;
    for (const auto& id : labels)
      if (!taxonomy->contains(id)) unknown.push_back("unknown requirement " + id.str());
    if (!unknown.empty()) throw ValidationError(std::move(unknown));
  }

  // Writes and flushes one event, then applies it.
  void commit(json event) {
    event["seq"] = seq + 1;
    if (journal.is_open()) {
      journal << event.dump() << '\n';
      journal.flush();
      if (!journal) throw IoError("failed writing journal " + path.string());
    }
    apply(event);
  }

  void apply(const json& event) {
    const std::string type = event.at("event").get<std::string>();
    if (type == "session-created") {
      Session s = session_from_json(event.at("session"));
      if (sessions.contains(s.id)) throw ValidationError("session " + s.id + " already exists");
      order.push_back(s.id);
      const std::string id = s.id;
      sessions[id].session = std::move(s);
    } else if (type == "labels") {
      LabelRecord r = label_record_from_json(event.at("record"));
      auto& history = find(r.session_id).labels[r.issue_id][r.coder_id];
      const std::uint64_t expected = history.empty() ? 1 : history.back().version + 1;
      if (r.version != expected) throw ValidationError("label version out of sequence");
      history.push_back(std::move(r));
    } else if (type == "state") {
      auto state = parse_state(event.at("state").get<std::string>());
      if (!state) throw ValidationError("unknown session state");
      find(event.at("session").get<std::string>()).session.state = *state;
    } else if (type == "final") {
      FinalLabel f = final_label_from_json(event.at("final"));
      auto& data = find(event.at("session").get<std::string>());
      data.finals[f.issue_id].push_back(std::move(f));
    } else {
      throw ValidationError("unknown journal event '" + type + "'");
    }
    seq = event.at("seq").get<std::uint64_t>();
  }

  void replay() {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      try {
        const json event = json::parse(line);
        if (event.at("seq").get<std::uint64_t>() != seq + 1) {
          throw ValidationError("sequence gap");
        }
        apply(event);
      } catch (const json::exception& e) {
        throw ParseError(std::string("corrupt journal: ") + e.what(), lineno);
      } catch (const Error& e) {
        throw ParseError(std::string("corrupt journal: ") + e.what(), lineno);
      }
    }
  }

  SessionSnapshot snapshot(const SessionData& data) const {
    SessionSnapshot snap{data.session, {}, {}};
    for (const auto& [issue, coders] : data.labels)
      for (const auto& [coder, history] : coders)
        if (!history.empty()) snap.latest[issue][coder] = history.back();
    for (const auto& [issue, decisions] : data.finals)
      if (!decisions.empty()) snap.finals[issue] = decisions.back();
    return snap;
  }

  GoldExport gold(const SessionData& data) const {
    GoldExport out;
    const auto& s = data.session;
    for (const auto& issue : s.issues) {
      const auto& final_label = data.finals.at(issue).back();
      GoldEntry entry{s.project, issue, final_label.labels, final_label.resolution, std::nullopt};
      if (auto t = s.issue_types.find(issue); t != s.issue_types.end()) entry.issue_type = t->second;
      out.gold.entries.push_back(std::move(entry));
      if (auto l = data.labels.find(issue); l != data.labels.end())
        for (const auto& [_, history] : l->second)
          out.history.insert(out.history.end(), history.begin(), history.end());
      const auto& decisions = data.finals.at(issue);
      out.resolutions.insert(out.resolutions.end(), decisions.begin(), decisions.end());
    }
    return out;
  }
};

WorkflowStore::WorkflowStore(std::shared_ptr<const taxonomy::Taxonomy> taxonomy,
                             std::filesystem::path journal, Clock clock)
    : impl_(std::make_unique<Impl>()) {
  if (!taxonomy) throw ConfigError("workflow store needs a taxonomy");
  impl_->taxonomy = std::move(taxonomy);
  impl_->path = std::move(journal);
  impl_->clock = clock ? std::move(clock) : Clock(utc_now);
  impl_->replay();
  impl_->journal.open(impl_->path, std::ios::app);
  if (!impl_->journal) throw IoError("cannot open journal " + impl_->path.string());
}

WorkflowStore::WorkflowStore(std::shared_ptr<const taxonomy::Taxonomy> taxonomy, Clock clock)
    : impl_(std::make_unique<Impl>()) {
  if (!taxonomy) throw ConfigError("workflow store needs a taxonomy");
  impl_->taxonomy = std::move(taxonomy);
  impl_->clock = clock ? std::move(clock) : Clock(utc_now);
}

WorkflowStore::~WorkflowStore() {
  if (impl_ && impl_->journal.is_open()) impl_->journal.flush();
}

const taxonomy::Taxonomy& WorkflowStore::taxonomy() const { return *impl_->taxonomy; }

const std::filesystem::path& WorkflowStore::journal_path() const { return impl_->path; }

Session WorkflowStore::create_session(const SessionSpec& spec) {
  if (spec.id.empty()) throw ValidationError("session id must not be empty");
  Session s;
  s.id = spec.id;
  s.project = spec.project;
  s.corpus_ref = spec.corpus_ref;
  s.coders = spec.coders;
  s.issues = spec.issues;
  s.issue_types = spec.issue_types;
  s.assignment = assign(spec.issues, spec.coders, spec.policy);
  std::unique_lock lock(impl_->mutex);
  if (impl_->sessions.contains(spec.id)) {
    throw ValidationError("session " + spec.id + " already exists");
  }
  s.taxonomy_version = impl_->taxonomy->version();
  s.created_at = impl_->clock();
  impl_->commit({{"event", "session-created"}, {"session", s}});
  return s;
}

Session WorkflowStore::session(std::string_view id) const {
  std::shared_lock lock(impl_->mutex);
  return impl_->find(id).session;
}

std::vector<Session> WorkflowStore::sessions() const {
  std::shared_lock lock(impl_->mutex);
  std::vector<Session> out;
  for (const auto& id : impl_->order) out.push_back(impl_->sessions.at(id).session);
  return out;
}

SessionSnapshot WorkflowStore::snapshot(std::string_view id) const {
  std::shared_lock lock(impl_->mutex);
  return impl_->snapshot(impl_->find(id));
}

LabelRecord WorkflowStore::submit_labels(std::string_view session_id, std::string_view coder,
                                         std::string_view issue, const LabelSet& labels,
                                         std::optional<std::uint64_t> base_version) {
  std::unique_lock lock(impl_->mutex);
  auto& data = impl_->find(session_id);
  if (data.session.state != SessionState::kOpen) {
    throw StateError("session " + data.session.id + " is " +
                     std::string(to_string(data.session.state)) + ", labels are closed");
  }
  Impl::require_issue(data, issue);
  if (!data.session.assignment.at(std::string(issue)).contains(std::string(coder))) {
    throw PermissionError("coder " + std::string(coder) + " is not assigned to issue " +
                          std::string(issue));
  }
  impl_->check_labels(labels);
  const auto& history = data.labels[std::string(issue)][std::string(coder)];
  const std::uint64_t current = history.empty() ? 0 : history.back().version;
  if (base_version && *base_version != current) {
    throw ConflictError("stale version " + std::to_string(*base_version) + " for issue " +
                            std::string(issue) + ", current is " + std::to_string(current),
                        current);
  }
  LabelRecord record{data.session.id, std::string(issue), std::string(coder), labels,
                     impl_->clock(), current + 1};
  impl_->commit({{"event", "labels"}, {"record", record}});
  return record;
}

std::vector<LabelRecord> WorkflowStore::history(std::string_view session_id,
                                                std::string_view issue,
                                                std::string_view coder) const {
  std::shared_lock lock(impl_->mutex);
  const auto& data = impl_->find(session_id);
  Impl::require_issue(data, issue);
  auto it = data.labels.find(std::string(issue));
  if (it == data.labels.end()) return {};
  auto h = it->second.find(std::string(coder));
  return h == it->second.end() ? std::vector<LabelRecord>{} : h->second;
}

Session WorkflowStore::start_adjudication(std::string_view session_id) {
  std::unique_lock lock(impl_->mutex);
  auto& data = impl_->find(session_id);
  if (data.session.state != SessionState::kOpen) {
    throw StateError("session " + data.session.id + " is " +
                     std::string(to_string(data.session.state)) + ", not open");
  }
  impl_->commit({{"event", "state"},
                 {"session", data.session.id},
                 {"state", to_string(SessionState::kAdjudicating)},
                 {"at", impl_->clock()}});
  return data.session;
}

DisagreementReport WorkflowStore::disagreements(std::string_view session_id) const {
  return snapshot(session_id).disagreements();
}

FinalLabel WorkflowStore::adjudicate(std::string_view session_id, std::string_view issue,
                                     const LabelSet& final_labels,
                                     std::optional<Resolution> resolution,
                                     std::vector<std::string> adjudicators, std::string note) {
  std::unique_lock lock(impl_->mutex);
  auto& data = impl_->find(session_id);
  if (data.session.state != SessionState::kAdjudicating) {
    throw StateError("session " + data.session.id + " is " +
                     std::string(to_string(data.session.state)) + ", not adjudicating");
  }
  Impl::require_issue(data, issue);
  impl_->check_labels(final_labels);
  std::vector<LabelSet> sets;
  std::vector<std::string> missing;
  for (const auto& coder : data.session.assignment.at(std::string(issue))) {
    auto it = data.labels.find(std::string(issue));
    if (it == data.labels.end() || !it->second.contains(coder) || it->second.at(coder).empty()) {
      missing.push_back(coder);
    } else {
      sets.push_back(it->second.at(coder).back().labels);
    }
  }
  if (!missing.empty()) {
    throw StateError("issue " + std::string(issue) + " still waits for " + join_names(missing));
  }
  const Resolution implied = classify_resolution(sets, final_labels);
  if (resolution && *resolution != implied) {
    throw ValidationError("resolution " + std::string(to_string(*resolution)) +
                          " does not match the label sets, which imply " +
                          std::string(to_string(implied)));
  }
  FinalLabel f{std::string(issue), final_labels, implied, std::move(adjudicators), std::move(note),
               impl_->clock()};
  impl_->commit({{"event", "final"}, {"session", data.session.id}, {"final", f}});
  return f;
}

GoldExport WorkflowStore::finalize(std::string_view session_id) {
  std::unique_lock lock(impl_->mutex);
  auto& data = impl_->find(session_id);
  if (data.session.state != SessionState::kAdjudicating) {
    throw StateError("session " + data.session.id + " is " +
                     std::string(to_string(data.session.state)) + ", not adjudicating");
  }
  const auto snap = impl_->snapshot(data);
  const auto report = snap.disagreements();
  std::vector<std::string> blocked;
  for (const auto& p : report.pending) blocked.push_back(p.issue_id + " (pending labels)");
  for (const auto& d : report.disagreements)
    if (!snap.finals.contains(d.issue_id)) blocked.push_back(d.issue_id + " (unresolved)");
  if (!blocked.empty()) throw StateError("cannot finalize: " + join_names(blocked));

  for (const auto& issue : report.unanimous) {
    if (snap.finals.contains(issue)) continue;
    const auto& coders = snap.latest.at(issue);
    FinalLabel f{issue, coders.begin()->second.labels, Resolution::kUnanimous, {}, {},
                 impl_->clock()};
    impl_->commit({{"event", "final"}, {"session", data.session.id}, {"final", f}});
  }
  impl_->commit({{"event", "state"},
                 {"session", data.session.id},
                 {"state", to_string(SessionState::kFinalized)},
                 {"at", impl_->clock()}});
  return impl_->gold(data);
}

GoldExport WorkflowStore::gold(std::string_view session_id) const {
  std::shared_lock lock(impl_->mutex);
  const auto& data = impl_->find(session_id);
  if (data.session.state != SessionState::kFinalized) {
    throw StateError("session " + data.session.id + " is not finalized");
  }
  return impl_->gold(data);
}

double WorkflowStore::percent_total_agreement(std::string_view session_id) const {
  return snapshot(session_id).percent_total_agreement();
}

void WorkflowStore::flush() {
  std::unique_lock lock(impl_->mutex);
  if (impl_->journal.is_open()) impl_->journal.flush();
}

}  // namespace privlens::workflow
