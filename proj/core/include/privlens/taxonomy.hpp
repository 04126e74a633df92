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

#ifndef PRIVLENS_TAXONOMY_HPP_
#define PRIVLENS_TAXONOMY_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "privlens/requirement_id.hpp"

namespace privlens::taxonomy {

// Closed list of action verbs a requirement may start with.
enum class ActionVerb {
  kAllow,
  kArchive,
  kCollect,
  kDocument,
  kErase,
  kImplement,
  kInform,
  kMaintain,
  kNotify,
  kObtain,
  kPresent,
  kProtect,
  kProvide,
  kRequest,
  kShow,
  kStore,
  kTransmit,
  kUse,
};

std::string_view to_string(ActionVerb verb);
std::optional<ActionVerb> parse_action(std::string_view text);

enum class RegulationSource { kGdpr, kIso29100, kThailandPdpa, kApec };

std::string_view to_string(RegulationSource source);
std::optional<RegulationSource> parse_source(std::string_view text);

// Checks the per-source locator grammar:
//   GDPR          article with optional paragraph/point groups: 13(2)(c), 16
//   ISO29100      dotted clause number: 5.2
//   ThailandPDPA  section with optional item: 19-5, 29
//   APEC          point or point range with optional item: 21-4, (21-23)-1
bool locator_valid(RegulationSource source, std::string_view locator);

struct RegulationRef {
  RegulationSource source = RegulationSource::kGdpr;
  std::string locator;

  // "SOURCE:locator". parse() throws ParseError on unknown sources or
  // locators that fail the source grammar.
  static RegulationRef parse(std::string_view text);
  std::string str() const;

  friend auto operator<=>(const RegulationRef&, const RegulationRef&) = default;
};

struct CategoryRef {
  std::string category;
  std::optional<std::string> subcategory;

  static CategoryRef parse(std::string_view text);  // "category[/sub]"
  std::string str() const;

  friend auto operator<=>(const CategoryRef&, const CategoryRef&) = default;
};

// The seven privacy-goal categories and their subcategories.
class CategoryTree {
 public:
  struct Node {
    std::string id;
    std::string title;
    std::vector<std::string> subcategories;
  };

  static const CategoryTree& standard();

  const std::vector<Node>& categories() const noexcept { return nodes_; }
  const Node* find(std::string_view category) const;
  bool contains(const CategoryRef& ref) const;

 private:
  explicit CategoryTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  std::vector<Node> nodes_;
};

struct Requirement {
  RequirementId id;
  ActionVerb action = ActionVerb::kAllow;
  std::string object;
  std::string target;
  std::vector<CategoryRef> categories;
  std::vector<RegulationRef> refs;

  // "ALLOW the data subjects to withdraw consent"
  std::string text() const;
  bool in_category(std::string_view category,
                   const std::optional<std::string>& subcategory = std::nullopt) const;
};

// Counts the shipped taxonomy must reproduce. Extensions that append
// requirements validate against a relaxed profile.
struct ValidationProfile {
  std::optional<std::size_t> expected_requirements = 71;
  std::map<std::string, std::size_t> expected_category_counts = {
      {"user-participation", 9}, {"notice", 32},    {"user-desirability", 10},
      {"data-processing", 16},   {"breach", 6},     {"complaint-request", 5},
      {"security", 13}};

  static ValidationProfile shipped() { return {}; }
  static ValidationProfile structural_only() { return {std::nullopt, {}}; }
};

class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(std::string version, std::vector<Requirement> requirements);

  const std::string& version() const noexcept { return version_; }
  const std::vector<Requirement>& requirements() const noexcept { return requirements_; }
  const CategoryTree& tree() const noexcept { return CategoryTree::standard(); }
  std::size_t size() const noexcept { return requirements_.size(); }

  const Requirement* find(RequirementId id) const;
  const Requirement& at(RequirementId id) const;  // throws NotFoundError
  bool contains(RequirementId id) const { return find(id) != nullptr; }

  // Number of distinct requirements carrying `category` (any subcategory).
  std::size_t category_count(std::string_view category) const;

 private:
  std::string version_;
  std::vector<Requirement> requirements_;  // sorted by id
};

// Parses a seed document without checking taxonomy invariants. Throws
// ParseError carrying the line and field of the first malformed record.
Taxonomy parse_taxonomy(std::istream& in);

// Every violated invariant, in a stable order. Empty means valid.
std::vector<std::string> validate(const Taxonomy& taxonomy,
                                  const ValidationProfile& profile = {});

// parse + validate; throws ValidationError listing all violations.
Taxonomy load_taxonomy(std::istream& in, const ValidationProfile& profile = {});
Taxonomy load_taxonomy_file(const std::filesystem::path& path,
                            const ValidationProfile& profile = {});

void write_taxonomy(std::ostream& out, const Taxonomy& taxonomy);

// Requirements in `category` (optionally narrowed to a subcategory), in id
// order. Unknown category or subcategory throws NotFoundError.
std::vector<Requirement> requirements_by_category(
    const Taxonomy& taxonomy, std::string_view category,
    const std::optional<std::string>& subcategory = std::nullopt);

// Locators grouped by source, in source enum order.
using TraceBySource = std::map<RegulationSource, std::vector<std::string>>;

TraceBySource trace_requirement(const Taxonomy& taxonomy, RequirementId id);

struct TraceEntry {
  RequirementId id;
  std::string text;
  TraceBySource refs;
};

struct TraceReport {
  std::string issue_id;
  std::vector<TraceEntry> entries;  // one per requirement, id order

  // Union over entries, deduplicated.
  TraceBySource sources() const;
};

// Throws ValidationError naming every dangling requirement id.
TraceReport trace_issue(std::string_view issue_id, const LabelSet& labels,
                        const Taxonomy& taxonomy);

}  // namespace privlens::taxonomy

#endif  // PRIVLENS_TAXONOMY_HPP_
