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

#ifndef PRIVLENS_WORKFLOW_HPP_
#define PRIVLENS_WORKFLOW_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/gold.hpp"
#include "privlens/irr.hpp"
#include "privlens/requirement_id.hpp"
#include "privlens/taxonomy.hpp"

namespace privlens::workflow {

enum class SessionState { kOpen, kAdjudicating, kFinalized };

std::string_view to_string(SessionState state);
std::optional<SessionState> parse_state(std::string_view text);

enum class AssignmentScheme {
  kSplitHalf,  // coder 1 on everything, coders 2 and 3 split the list at ceil(n/2)
  kKOfN,       // k coders per issue, slots dealt round-robin
};

std::string_view to_string(AssignmentScheme scheme);
std::optional<AssignmentScheme> parse_scheme(std::string_view text);

struct AssignmentPolicy {
  AssignmentScheme scheme = AssignmentScheme::kSplitHalf;
  std::size_t k = 2;
};

using Assignment = std::map<std::string, std::set<std::string>>;

// Throws ConfigError for unusable coder lists and ValidationError for an
// empty or duplicated issue list.
Assignment assign(std::span<const std::string> issues, std::span<const std::string> coders,
                  const AssignmentPolicy& policy = {});

struct Session {
  std::string id;
  std::string project;
  std::string corpus_ref;
  std::string taxonomy_version;
  std::vector<std::string> coders;
  std::vector<std::string> issues;  // corpus order
  std::map<std::string, std::string> issue_types;
  Assignment assignment;
  SessionState state = SessionState::kOpen;
  std::string created_at;

  // Issues assigned to `coder`, in corpus order.
  std::vector<std::string> issues_for(std::string_view coder) const;
};

struct SessionSpec {
  std::string id;
  std::string project;
  std::string corpus_ref;
  std::vector<std::string> coders;
  std::vector<std::string> issues;
  std::map<std::string, std::string> issue_types;
  AssignmentPolicy policy;
};

struct LabelRecord {
  std::string session_id;
  std::string issue_id;
  std::string coder_id;
  LabelSet labels;
  std::string submitted_at;
  std::uint64_t version = 0;  // 1-based per (issue, coder)

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

struct Disagreement {
  std::string issue_id;
  std::map<std::string, LabelSet> sets;
  // Largest pairwise MASI distance; the distance itself for two coders.
  double masi_distance = 0;
};

struct PendingIssue {
  std::string issue_id;
  std::vector<std::string> missing_coders;
};

struct DisagreementReport {
  std::vector<Disagreement> disagreements;
  std::vector<std::string> unanimous;
  std::vector<PendingIssue> pending;
};

struct FinalLabel {
  std::string issue_id;
  LabelSet labels;
  Resolution resolution = Resolution::kUnanimous;
  std::vector<std::string> adjudicators;
  std::string note;
  std::string decided_at;

  friend bool operator==(const FinalLabel&, const FinalLabel&) = default;
};

// The resolution kind that `final_labels` implies for the coder sets.
Resolution classify_resolution(std::span<const LabelSet> coder_sets, const LabelSet& final_labels);

// Latest state of one session. Immutable once returned.
struct SessionSnapshot {
  Session session;
  std::map<std::string, std::map<std::string, LabelRecord>> latest;  // issue -> coder
  std::map<std::string, FinalLabel> finals;

  DisagreementReport disagreements() const;
  // Throws StateError naming pending issues.
  double percent_total_agreement() const;
  // Every submitted labeling, one unit per issue, session issue order.
  irr::LabeledUnits units() const;
};

struct GoldExport {
  GoldDataset gold;
  std::vector<LabelRecord> history;
  std::vector<FinalLabel> resolutions;
};

// Sessions, label versions and final labels backed by an append-only
// journal. Each mutation is validated, written and flushed before it becomes
// visible. Reads take a shared lock and copy out.
class WorkflowStore {
 public:
  using Clock = std::function<std::string()>;

  // Replays `journal` (created when absent). Malformed journals throw
  // ParseError naming the line.
  WorkflowStore(std::shared_ptr<const taxonomy::Taxonomy> taxonomy,
                std::filesystem::path journal, Clock clock = {});
  // Volatile store with no journal.
  explicit WorkflowStore(std::shared_ptr<const taxonomy::Taxonomy> taxonomy, Clock clock = {});
  ~WorkflowStore();

  WorkflowStore(const WorkflowStore&) = delete;
  WorkflowStore& operator=(const WorkflowStore&) = delete;

  const taxonomy::Taxonomy& taxonomy() const;
  const std::filesystem::path& journal_path() const;

  Session create_session(const SessionSpec& spec);
  Session session(std::string_view id) const;
  std::vector<Session> sessions() const;
  SessionSnapshot snapshot(std::string_view id) const;

  // `base_version` is the version the caller last saw (0 before the first
  // submission); a mismatch throws ConflictError. nullopt skips the check.
  LabelRecord submit_labels(std::string_view session_id, std::string_view coder,
                            std::string_view issue, const LabelSet& labels,
                            std::optional<std::uint64_t> base_version = std::nullopt);

  std::vector<LabelRecord> history(std::string_view session_id, std::string_view issue,
                                   std::string_view coder) const;

  Session start_adjudication(std::string_view session_id);
  DisagreementReport disagreements(std::string_view session_id) const;

  // `resolution` defaults to the kind implied by the sets; a stated kind that
  // disagrees throws ValidationError. May be repeated; the latest decision
  // wins.
  FinalLabel adjudicate(std::string_view session_id, std::string_view issue,
                        const LabelSet& final_labels, std::optional<Resolution> resolution,
                        std::vector<std::string> adjudicators, std::string note);

  // Records unanimous finals for agreed issues that have none, then closes
  // the session. Throws StateError listing issues still pending.
  GoldExport finalize(std::string_view session_id);
  GoldExport gold(std::string_view session_id) const;

  double percent_total_agreement(std::string_view session_id) const;

  void flush();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace privlens::workflow

#endif  // PRIVLENS_WORKFLOW_HPP_
