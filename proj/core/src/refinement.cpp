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

#include "privlens/refinement.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "text_util.hpp"

namespace privlens::refine {

namespace {

constexpr std::array<std::pair<IntentClass, std::string_view>, 9> kIntents = {{
    {IntentClass::kNone, ""},
    {IntentClass::kRights, "rights"},
    {IntentClass::kGiveInfo, "give-info"},
    {IntentClass::kAcquireConsent, "acquire-consent"},
    {IntentClass::kOptions, "options"},
    {IntentClass::kDisplay, "display"},
    {IntentClass::kAlert, "alert"},
    {IntentClass::kMechanism, "mechanism"},
    {IntentClass::kDeletion, "deletion"},
}};

constexpr std::string_view kHeader =
    "source\tlocator\traw_quote\tis_requirement\taction\tparties\ttarget\tgoal_key\tintent_class"
    "\tpolarity";

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string collapse_spaces(std::string_view text) {
  return detail::join(detail::words(text), " ");
}

std::string party_key(const std::vector<std::string>& parties) {
  return detail::join(parties, " and ");
}

// True when `needle` occurs as a contiguous run of whole tokens in `hay`.
bool contains_tokens(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return needle.empty();
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

std::string_view to_string(IntentClass intent) {
  for (const auto& [i, name] : kIntents)
    if (i == intent) return name;
  return "";
}

std::optional<IntentClass> parse_intent(std::string_view text) {
  for (const auto& [i, name] : kIntents)
    if (name == text) return i;
  return std::nullopt;
}

std::optional<ActionVerb> ladder_verb(IntentClass intent) {
  switch (intent) {
    case IntentClass::kRights: return ActionVerb::kAllow;
    case IntentClass::kGiveInfo: return ActionVerb::kProvide;
    case IntentClass::kAcquireConsent: return ActionVerb::kObtain;
    case IntentClass::kOptions: return ActionVerb::kPresent;
    case IntentClass::kDisplay: return ActionVerb::kShow;
    case IntentClass::kAlert: return ActionVerb::kNotify;
    case IntentClass::kMechanism: return ActionVerb::kImplement;
    case IntentClass::kDeletion: return ActionVerb::kErase;
    case IntentClass::kNone: break;
  }
  return std::nullopt;
}

Polarity Polarity::parse(std::string_view text) {
  text = detail::trim(text);
  if (text.size() < 2 || (text.front() != '+' && text.front() != '-')) {
    throw ParseError("polarity must be +constraint or -constraint, got '" + std::string(text) +
                     "'");
  }
  return {std::string(text.substr(1)), text.front() == '+'};
}

std::string Polarity::str() const { return (positive ? "+" : "-") + constraint; }

std::vector<std::string> check(const CodedStatement& s) {
  std::vector<std::string> out;
  const std::string where = s.source_ref.str() + (s.line ? " (line " + std::to_string(s.line) + ")" : "");
  if (s.raw_quote.empty()) out.push_back(where + ": empty quote");
  if (s.is_requirement) {
    if (!s.action) out.push_back(where + ": requirement without action");
    if (s.parties.empty()) out.push_back(where + ": requirement without parties");
    if (s.target.empty()) out.push_back(where + ": requirement without target");
    if (s.goal_key.empty()) out.push_back(where + ": requirement without goal key");
  } else if (s.action || !s.parties.empty() || !s.target.empty() || !s.goal_key.empty() ||
             s.polarity) {
    out.push_back(where + ": non-requirement carries requirement fields");
  }
  return out;
}

std::vector<CodedStatement> parse_coded_statements(std::istream& in) {
  std::vector<CodedStatement> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kHeader) throw ParseError("unexpected header", lineno);
      header_seen = true;
      continue;
    }
    auto f = detail::split_fields(line, '\t');
    if (f.size() < 4 || f.size() > 10) {
      throw ParseError("expected 4 to 10 tab-separated fields", lineno);
    }
    f.resize(10);
    CodedStatement s;
    s.line = lineno;
    try {
      s.source_ref = taxonomy::RegulationRef::parse(f[0] + ":" + f[1]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, "locator");
    }
    s.raw_quote = f[2];
    if (f[3] == "yes") {
      s.is_requirement = true;
    } else if (f[3] != "no") {
      throw ParseError("is_requirement must be yes or no", lineno, "is_requirement");
    }
    if (!f[4].empty()) {
      s.action = taxonomy::parse_action(f[4]);
      if (!s.action) throw ParseError("unknown action '" + f[4] + "'", lineno, "action");
    }
    s.parties = detail::split_trimmed(f[5], ';');
    s.target = std::string(detail::trim(f[6]));
    s.goal_key = std::string(detail::trim(f[7]));
    auto intent = parse_intent(detail::trim(f[8]));
    if (!intent) throw ParseError("unknown intent class '" + f[8] + "'", lineno, "intent_class");
    s.intent = *intent;
    if (!detail::trim(f[9]).empty()) {
      try {
        s.polarity = Polarity::parse(f[9]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), lineno, "polarity");
      }
    }
    out.push_back(std::move(s));
  }
  if (in.bad()) throw IoError("failed reading coded statements");
  return out;
}

std::vector<CodedStatement> load_coded_statements(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open coded statements " + path.string());
  auto statements = parse_coded_statements(in);
  std::vector<std::string> violations;
  for (const auto& s : statements) {
    auto v = check(s);
    violations.insert(violations.end(), v.begin(), v.end());
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return statements;
}

void write_coded_statements(std::ostream& out, std::span<const CodedStatement> statements) {
  out << kHeader << '\n';
  for (const auto& s : statements) {
    out << to_string(s.source_ref.source) << '\t' << s.source_ref.locator << '\t' << s.raw_quote
        << '\t' << (s.is_requirement ? "yes" : "no") << '\t'
        << (s.action ? to_string(*s.action) : "") << '\t' << detail::join(s.parties, ";") << '\t'
        << s.target << '\t' << s.goal_key << '\t' << to_string(s.intent) << '\t'
        << (s.polarity ? s.polarity->str() : "") << '\n';
  }
}

SynonymTable::SynonymTable(std::vector<std::pair<std::string, std::string>> entries) {
  for (auto& [from, to] : entries) add(std::move(from), std::move(to));
}

const SynonymTable& SynonymTable::gdpr() {
  static const SynonymTable table({
      {"PII principals", "data subjects"},
      {"PII principal", "data subject"},
      {"PII controllers", "data controllers"},
      {"PII controller", "data controller"},
      {"PII processors", "data processors"},
      {"PII processor", "data processor"},
      {"PII", "personal data"},
  });
  return table;
}

void SynonymTable::add(std::string from, std::string to) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == from; });
  if (it != entries_.end()) {
    it->second = std::move(to);
    return;
  }
  entries_.emplace_back(std::move(from), std::move(to));
  std::stable_sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
}

std::string SynonymTable::normalize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool at_word_start = i == 0 || !word_char(text[i - 1]);
    bool replaced = false;
    if (at_word_start) {
      for (const auto& [from, to] : entries_) {
        if (text.compare(i, from.size(), from) != 0) continue;
        const std::size_t end = i + from.size();
        if (end < text.size() && word_char(text[end])) continue;
        out += to;
        i = end;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += text[i++];
  }
  return collapse_spaces(out);
}

std::vector<std::string> normalize_terms(std::span<const std::string> terms,
                                         const SynonymTable& table) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(table.normalize(t));
  return out;
}

std::vector<SimilarityGroup> group_candidates(std::span<const CodedStatement> statements,
                                              const SynonymTable& table) {
  std::vector<SimilarityGroup> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& s : statements) {
    if (!s.is_requirement) continue;
    auto parties = normalize_terms(s.parties, table);
    auto key = std::make_pair(s.goal_key, party_key(parties));
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({s.goal_key, std::move(parties), {}});
    groups[it->second].members.push_back(s);
  }
  return groups;
}

std::string MergedRequirement::text() const {
  return std::string(to_string(action)) + " " + object + " " + target;
}

MergedRequirement merge_group(const SimilarityGroup& group, const SynonymTable& table) {
  if (group.members.empty()) throw UnmergeableError("empty similarity group", group);
  MergedRequirement merged;
  merged.goal_key = group.goal_key;
  merged.object = party_key(group.parties);

  std::set<ActionVerb> verbs;
  std::set<IntentClass> intents;
  for (const auto& m : group.members) {
    if (!m.action) throw UnmergeableError("member without action in " + group.goal_key, group);
    verbs.insert(*m.action);
    intents.insert(m.intent);
  }
  if (verbs.size() == 1) {
    merged.action = *verbs.begin();
  } else {
    if (intents.size() != 1) {
      throw UnmergeableError("group " + group.goal_key + " mixes intent classes", group);
    }
    auto verb = ladder_verb(*intents.begin());
    if (!verb) {
      throw UnmergeableError("group " + group.goal_key + " has differing verbs and no intent",
                             group);
    }
    merged.action = *verb;
  }

  std::set<std::string> targets;
  for (const auto& m : group.members) targets.insert(table.normalize(m.target));
  if (targets.size() == 1) {
    merged.target = *targets.begin();
  } else {
    std::vector<std::vector<std::string>> tokens;
    for (const auto& t : targets) tokens.push_back(detail::words(t));
    std::optional<std::size_t> best;
    std::size_t i = 0;
    for (auto it = targets.begin(); it != targets.end(); ++it, ++i) {
      bool inside_all = true;
      for (std::size_t j = 0; j < tokens.size() && inside_all; ++j)
        if (j != i) inside_all = contains_tokens(tokens[j], tokens[i]);
      // Iteration is lexicographic, so the first shortest candidate wins ties.
      if (inside_all && (!best || tokens[i].size() < tokens[*best].size())) best = i;
    }
    if (best) {
      merged.target = *std::next(targets.begin(), static_cast<std::ptrdiff_t>(*best));
    } else {
      merged.target = detail::join(std::vector<std::string>(targets.begin(), targets.end()), "; ");
      merged.needs_review = true;
    }
  }

  for (const auto& m : group.members) {
    if (std::find(merged.provenance.begin(), merged.provenance.end(), m.source_ref) ==
        merged.provenance.end()) {
      merged.provenance.push_back(m.source_ref);
    }
  }
  return merged;
}

std::vector<InconsistencyReport> detect_inconsistencies(std::span<const CodedStatement> statements,
                                                        const SynonymTable& table) {
  std::vector<InconsistencyReport> out;
  for (const auto& group : group_candidates(statements, table)) {
    const auto& members = group.members;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (!members[i].polarity) continue;
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (members[j].polarity && members[i].polarity->opposes(*members[j].polarity)) {
          out.push_back({members[i], members[j], members[i].polarity->constraint});
        }
      }
    }
  }
  return out;
}

std::size_t PipelineAudit::total_shortlisted() const {
  std::size_t n = 0;
  for (const auto& [_, c] : shortlisted) n += c;
  return n;
}

std::size_t PipelineAudit::total_identified() const {
  std::size_t n = 0;
  for (const auto& [_, c] : identified) n += c;
  return n;
}

PipelineAudit pipeline_audit(std::span<const CodedStatement> statements,
                             std::span<const SimilarityGroup> groups,
                             std::span<const MergedRequirement> merged) {
  PipelineAudit audit;
  std::set<std::tuple<RegulationSource, std::string, std::string>> distinct;
  for (const auto& s : statements) {
    if (distinct.emplace(s.source_ref.source, s.source_ref.locator, s.raw_quote).second) {
      ++audit.shortlisted[s.source_ref.source];
    }
    if (s.is_requirement) ++audit.identified[s.source_ref.source];
  }
  std::size_t grouped = 0;
  for (const auto& g : groups) {
    if (g.members.empty()) throw AuditError("group " + g.goal_key + " is empty");
    grouped += g.members.size();
    audit.merged_away += g.members.size() - 1;
  }
  audit.final_count = merged.size();

  const std::size_t identified = audit.total_identified();
  if (grouped != identified) {
    throw AuditError(std::to_string(identified) + " identified statements but " +
                     std::to_string(grouped) + " grouped");
  }
  if (merged.size() != groups.size()) {
    throw AuditError(std::to_string(groups.size()) + " groups but " +
                     std::to_string(merged.size()) + " merged requirements");
  }
  if (identified - audit.merged_away != audit.final_count) {
    throw AuditError("identified - merged-away != final");
  }
  return audit;
}

RefinementRun run_refinement(std::span<const CodedStatement> statements,
                             const SynonymTable& table) {
  std::vector<std::string> violations;
  for (const auto& s : statements) {
    auto v = check(s);
    violations.insert(violations.end(), v.begin(), v.end());
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  RefinementRun run;
  run.groups = group_candidates(statements, table);
  run.merged.reserve(run.groups.size());
  for (const auto& g : run.groups) run.merged.push_back(merge_group(g, table));
  run.audit = pipeline_audit(statements, run.groups, run.merged);
  return run;
}

std::vector<std::string> compare_with_taxonomy(std::span<const MergedRequirement> merged,
                                               const taxonomy::Taxonomy& taxonomy) {
  std::vector<std::string> out;
  std::set<RequirementId> matched;
  for (const auto& m : merged) {
    std::set<RegulationRef> provenance(m.provenance.begin(), m.provenance.end());
    std::vector<const taxonomy::Requirement*> candidates;
    for (const auto& r : taxonomy.requirements()) {
      if (std::set<RegulationRef>(r.refs.begin(), r.refs.end()) == provenance) {
        candidates.push_back(&r);
      }
    }
    if (candidates.size() > 1) {
      std::erase_if(candidates, [&](const auto* r) { return r->action != m.action; });
    }
    if (candidates.empty()) {
      out.push_back("no taxonomy requirement shares the provenance of '" + m.text() + "'");
      continue;
    }
    if (candidates.size() > 1) {
      out.push_back("ambiguous provenance for '" + m.text() + "'");
      continue;
    }
    const auto& r = *candidates.front();
    if (!matched.insert(r.id).second) {
      out.push_back(r.id.str() + " matched by more than one merged requirement");
    }
    if (r.action != m.action) {
      out.push_back(r.id.str() + " action " + std::string(to_string(r.action)) + " but merged " +
                    std::string(to_string(m.action)));
    } else if (r.text() != m.text()) {
      out.push_back(r.id.str() + " reads '" + r.text() + "' but merged '" + m.text() + "'");
    }
  }
  for (const auto& r : taxonomy.requirements())
    if (!matched.contains(r.id)) out.push_back(r.id.str() + " has no merged counterpart");
  return out;
}

}  // namespace privlens::refine
