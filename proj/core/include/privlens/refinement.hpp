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

#ifndef PRIVLENS_REFINEMENT_HPP_
#define PRIVLENS_REFINEMENT_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "privlens/error.hpp"
#include "privlens/taxonomy.hpp"

namespace privlens::refine {

using taxonomy::ActionVerb;
using taxonomy::RegulationRef;
using taxonomy::RegulationSource;

// Goal-intent class a coder assigns to a statement. Selects the verb when
// merged members disagree on their action.
enum class IntentClass {
  kNone,
  kRights,          // ALLOW
  kGiveInfo,        // PROVIDE
  kAcquireConsent,  // OBTAIN
  kOptions,         // PRESENT
  kDisplay,         // SHOW
  kAlert,           // NOTIFY
  kMechanism,       // IMPLEMENT
  kDeletion,        // ERASE
};

std::string_view to_string(IntentClass intent);
std::optional<IntentClass> parse_intent(std::string_view text);
std::optional<ActionVerb> ladder_verb(IntentClass intent);

// Constraint marker such as "+specific-purpose" / "-specific-purpose".
struct Polarity {
  std::string constraint;
  bool positive = true;

  static Polarity parse(std::string_view text);
  std::string str() const;
  bool opposes(const Polarity& other) const {
    return constraint == other.constraint && positive != other.positive;
  }
  friend bool operator==(const Polarity&, const Polarity&) = default;
};

enum class LogicalOp { kAnd, kOr };

struct CodedStatement {
  RegulationRef source_ref;
  std::string raw_quote;
  bool is_requirement = false;
  std::optional<ActionVerb> action;
  std::vector<std::string> parties;
  std::string target;
  std::string goal_key;
  IntentClass intent = IntentClass::kNone;
  std::optional<Polarity> polarity;
  // Reserved for parent/child refinement; no operation reads these yet.
  std::optional<std::string> parent_goal;
  std::optional<LogicalOp> parent_op;
  std::size_t line = 0;

  friend bool operator==(const CodedStatement&, const CodedStatement&) = default;
};

// Violations of the CodedStatement invariants (empty when valid).
std::vector<std::string> check(const CodedStatement& statement);

std::vector<CodedStatement> parse_coded_statements(std::istream& in);
std::vector<CodedStatement> load_coded_statements(const std::filesystem::path& path);
void write_coded_statements(std::ostream& out, std::span<const CodedStatement> statements);

// Maps regulation-specific vocabulary onto GDPR terms. Matching is
// whole-word and longest-first, so "PII principal" never becomes
// "personal data principal".
class SynonymTable {
 public:
  SynonymTable() = default;
  explicit SynonymTable(std::vector<std::pair<std::string, std::string>> entries);

  static const SynonymTable& gdpr();

  void add(std::string from, std::string to);
  std::string normalize(std::string_view text) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;  // longest key first
};

std::vector<std::string> normalize_terms(std::span<const std::string> terms,
                                         const SynonymTable& table = SynonymTable::gdpr());

struct SimilarityGroup {
  std::string goal_key;
  std::vector<std::string> parties;  // normalized
  std::vector<CodedStatement> members;
};

// Partitions requirement-bearing statements by (goal key, normalized
// parties). Groups appear in order of their first member.
std::vector<SimilarityGroup> group_candidates(std::span<const CodedStatement> statements,
                                              const SynonymTable& table = SynonymTable::gdpr());

struct MergedRequirement {
  ActionVerb action = ActionVerb::kAllow;
  std::string object;
  std::string target;
  std::string goal_key;
  std::vector<RegulationRef> provenance;
  // Set when differing targets could not be reconciled and were concatenated.
  bool needs_review = false;

  std::string text() const;
};

class UnmergeableError : public Error {
 public:
  UnmergeableError(const std::string& message, SimilarityGroup group)
      : Error(ErrorKind::kUnmergeable, message), group_(std::move(group)) {}

  const SimilarityGroup& group() const noexcept { return group_; }

 private:
  SimilarityGroup group_;
};

MergedRequirement merge_group(const SimilarityGroup& group,
                              const SynonymTable& table = SynonymTable::gdpr());

struct InconsistencyReport {
  CodedStatement first;
  CodedStatement second;
  std::string constraint;
};

std::vector<InconsistencyReport> detect_inconsistencies(
    std::span<const CodedStatement> statements,
    const SynonymTable& table = SynonymTable::gdpr());

struct PipelineAudit {
  std::map<RegulationSource, std::size_t> shortlisted;
  std::map<RegulationSource, std::size_t> identified;
  std::size_t merged_away = 0;
  std::size_t final_count = 0;

  std::size_t total_shortlisted() const;
  std::size_t total_identified() const;
};

// Throws AuditError when the counts do not reconcile.
PipelineAudit pipeline_audit(std::span<const CodedStatement> statements,
                             std::span<const SimilarityGroup> groups,
                             std::span<const MergedRequirement> merged);

struct RefinementRun {
  std::vector<SimilarityGroup> groups;
  std::vector<MergedRequirement> merged;
  PipelineAudit audit;
};

RefinementRun run_refinement(std::span<const CodedStatement> statements,
                             const SynonymTable& table = SynonymTable::gdpr());

// Pairs each merged requirement with the taxonomy entry whose regulation
// references are the same multiset. Returns one message per mismatch
// (missing, ambiguous, action or wording difference).
std::vector<std::string> compare_with_taxonomy(std::span<const MergedRequirement> merged,
                                               const taxonomy::Taxonomy& taxonomy);

}  // namespace privlens::refine

#endif  // PRIVLENS_REFINEMENT_HPP_
