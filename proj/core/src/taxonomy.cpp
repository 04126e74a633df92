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

#include "privlens/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <set>

#include "privlens/error.hpp"
#include "text_util.hpp"

namespace privlens::taxonomy {

namespace {

constexpr std::array<std::pair<ActionVerb, std::string_view>, 18> kVerbs = {{
    {ActionVerb::kAllow, "ALLOW"},         {ActionVerb::kArchive, "ARCHIVE"},
    {ActionVerb::kCollect, "COLLECT"},     {ActionVerb::kDocument, "DOCUMENT"},
    {ActionVerb::kErase, "ERASE"},         {ActionVerb::kImplement, "IMPLEMENT"},
    {ActionVerb::kInform, "INFORM"},       {ActionVerb::kMaintain, "MAINTAIN"},
    {ActionVerb::kNotify, "NOTIFY"},       {ActionVerb::kObtain, "OBTAIN"},
    {ActionVerb::kPresent, "PRESENT"},     {ActionVerb::kProtect, "PROTECT"},
    {ActionVerb::kProvide, "PROVIDE"},     {ActionVerb::kRequest, "REQUEST"},
    {ActionVerb::kShow, "SHOW"},           {ActionVerb::kStore, "STORE"},
    {ActionVerb::kTransmit, "TRANSMIT"},   {ActionVerb::kUse, "USE"},
}};

constexpr std::array<std::pair<RegulationSource, std::string_view>, 4> kSources = {{
    {RegulationSource::kGdpr, "GDPR"},
    {RegulationSource::kIso29100, "ISO29100"},
    {RegulationSource::kThailandPdpa, "ThailandPDPA"},
    {RegulationSource::kApec, "APEC"},
}};

const std::regex& locator_grammar(RegulationSource source) {
  static const std::regex gdpr(R"(\d+(\((\d+|[a-z]+)\)){0,3})");
  static const std::regex iso(R"(\d+(\.\d+)*)");
  static const std::regex pdpa(R"(\d+(-\d+)?)");
  static const std::regex apec(R"((\d+|\(\d+-\d+\))(-\d+)?)");
  switch (source) {
    case RegulationSource::kGdpr: return gdpr;
    case RegulationSource::kIso29100: return iso;
    case RegulationSource::kThailandPdpa: return pdpa;
    case RegulationSource::kApec: return apec;
  }
  return gdpr;
}

}  // namespace

std::string_view to_string(ActionVerb verb) {
  for (const auto& [v, name] : kVerbs)
    if (v == verb) return name;
  return "?";
}

std::optional<ActionVerb> parse_action(std::string_view text) {
  for (const auto& [v, name] : kVerbs)
    if (name == text) return v;
  return std::nullopt;
}

std::string_view to_string(RegulationSource source) {
  for (const auto& [s, name] : kSources)
    if (s == source) return name;
  return "?";
}

std::optional<RegulationSource> parse_source(std::string_view text) {
  for (const auto& [s, name] : kSources)
    if (name == text) return s;
  return std::nullopt;
}

bool locator_valid(RegulationSource source, std::string_view locator) {
  return std::regex_match(locator.begin(), locator.end(), locator_grammar(source));
}

RegulationRef RegulationRef::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("regulation ref '" + std::string(text) + "' lacks SOURCE:locator form");
  }
  auto source = parse_source(detail::trim(text.substr(0, colon)));
  if (!source) {
    throw ParseError("unknown regulation source in '" + std::string(text) + "'");
  }
  std::string locator(detail::trim(text.substr(colon + 1)));
  if (!locator_valid(*source, locator)) {
    throw ParseError("locator '" + locator + "' is not valid for " +
                     std::string(to_string(*source)));
  }
  return {*source, std::move(locator)};
}

std::string RegulationRef::str() const {
  return std::string(to_string(source)) + ":" + locator;
}

CategoryRef CategoryRef::parse(std::string_view text) {
  text = detail::trim(text);
  if (text.empty()) throw ParseError("empty category");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return {std::string(text), std::nullopt};
  auto category = detail::trim(text.substr(0, slash));
  auto sub = detail::trim(text.substr(slash + 1));
  if (category.empty() || sub.empty()) {
    throw ParseError("malformed category '" + std::string(text) + "'");
  }
  return {std::string(category), std::string(sub)};
}

std::string CategoryRef::str() const {
  return subcategory ? category + "/" + *subcategory : category;
}

const CategoryTree& CategoryTree::standard() {
  static const CategoryTree tree({
      {"user-participation", "User participation", {}},
      {"notice", "Notice", {"data-subjects", "relevant-parties"}},
      {"user-desirability", "User desirability", {"consent", "choice", "preference"}},
      {"data-processing",
       "Data processing",
       {"collection", "use", "storage", "erasure", "transfer", "record"}},
      {"breach", "Breach", {}},
      {"complaint-request", "Complaint/Request", {}},
      {"security", "Security", {}},
  });
  return tree;
}

const CategoryTree::Node* CategoryTree::find(std::string_view category) const {
  for (const auto& node : nodes_)
    if (node.id == category) return &node;
  return nullptr;
}

bool CategoryTree::contains(const CategoryRef& ref) const {
  const Node* node = find(ref.category);
  if (!node) return false;
  if (!ref.subcategory) return true;
  return std::find(node->subcategories.begin(), node->subcategories.end(), *ref.subcategory) !=
         node->subcategories.end();
}

std::string Requirement::text() const {
  return std::string(to_string(action)) + " " + object + " " + target;
}

bool Requirement::in_category(std::string_view category,
                              const std::optional<std::string>& subcategory) const {
  return std::any_of(categories.begin(), categories.end(), [&](const CategoryRef& c) {
    return c.category == category && (!subcategory || c.subcategory == subcategory);
  });
}

Taxonomy::Taxonomy(std::string version, std::vector<Requirement> requirements)
    : version_(std::move(version)), requirements_(std::move(requirements)) {
  std::stable_sort(requirements_.begin(), requirements_.end(),
                   [](const Requirement& a, const Requirement& b) { return a.id < b.id; });
}

const Requirement* Taxonomy::find(RequirementId id) const {
  auto it = std::lower_bound(requirements_.begin(), requirements_.end(), id,
                             [](const Requirement& r, RequirementId key) { return r.id < key; });
  return it != requirements_.end() && it->id == id ? &*it : nullptr;
}

const Requirement& Taxonomy::at(RequirementId id) const {
  if (const Requirement* r = find(id)) return *r;
  throw NotFoundError("requirement " + id.str() + " is not in taxonomy " + version_);
}

std::size_t Taxonomy::category_count(std::string_view category) const {
  return static_cast<std::size_t>(
      std::count_if(requirements_.begin(), requirements_.end(),
                    [&](const Requirement& r) { return r.in_category(category); }));
}

Taxonomy parse_taxonomy(std::istream& in) {
  std::string version;
  std::vector<Requirement> requirements;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    if (line.front() == '@') {
      auto fields = detail::split_fields(line, '\t');
      if (fields.size() != 2 || fields[0] != "@version") {
        throw ParseError("unknown directive", lineno, fields[0]);
      }
      version = std::string(detail::trim(fields[1]));
      continue;
    }
    auto fields = detail::split_fields(line, '\t');
    if (fields.size() != 6) {
      throw ParseError("expected 6 tab-separated fields, found " + std::to_string(fields.size()),
                       lineno);
    }
    Requirement r;
    try {
      r.id = RequirementId::parse(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, "id");
    }
    auto action = parse_action(fields[1]);
    if (!action) throw ParseError("unknown action verb '" + fields[1] + "'", lineno, "action");
    r.action = *action;
    r.object = std::string(detail::trim(fields[2]));
    r.target = std::string(detail::trim(fields[3]));
    try {
      for (const auto& c : detail::split_trimmed(fields[4], ';'))
        r.categories.push_back(CategoryRef::parse(c));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, "categories");
    }
    try {
      for (const auto& ref : detail::split_trimmed(fields[5], ';'))
        r.refs.push_back(RegulationRef::parse(ref));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno, "refs");
    }
    requirements.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("failed reading taxonomy seed");
  return Taxonomy(std::move(version), std::move(requirements));
}

std::vector<std::string> validate(const Taxonomy& taxonomy, const ValidationProfile& profile) {
  std::vector<std::string> out;
  const auto& tree = taxonomy.tree();
  if (taxonomy.version().empty()) out.push_back("missing @version directive");
  if (profile.expected_requirements && taxonomy.size() != *profile.expected_requirements) {
    out.push_back(std::to_string(taxonomy.size()) + " requirements, expected " +
                  std::to_string(*profile.expected_requirements));
  }
  std::set<RequirementId> seen;
  for (const auto& r : taxonomy.requirements()) {
    const std::string id = r.id.str();
    if (!seen.insert(r.id).second) out.push_back("duplicate id " + id);
    if (r.object.empty()) out.push_back(id + " has an empty object");
    if (r.target.empty()) out.push_back(id + " has an empty target");
    if (r.categories.empty()) out.push_back(id + " has no category");
    if (r.refs.empty()) out.push_back(id + " has no regulation reference");
    for (const auto& c : r.categories)
      if (!tree.contains(c)) out.push_back(id + " uses unknown category " + c.str());
    std::set<CategoryRef> cats(r.categories.begin(), r.categories.end());
    if (cats.size() != r.categories.size()) out.push_back(id + " repeats a category");
    std::set<RegulationRef> refs(r.refs.begin(), r.refs.end());
    if (refs.size() != r.refs.size()) out.push_back(id + " repeats a regulation reference");
  }
  for (const auto& [category, expected] : profile.expected_category_counts) {
    if (!tree.find(category)) {
      out.push_back("profile names unknown category " + category);
      continue;
    }
    const std::size_t actual = taxonomy.category_count(category);
    if (actual != expected) {
      out.push_back("category " + category + " has " + std::to_string(actual) +
                    " requirements, expected " + std::to_string(expected));
    }
  }
  return out;
}

Taxonomy load_taxonomy(std::istream& in, const ValidationProfile& profile) {
  Taxonomy t = parse_taxonomy(in);
  auto violations = validate(t, profile);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return t;
}

Taxonomy load_taxonomy_file(const std::filesystem::path& path, const ValidationProfile& profile) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxonomy seed " + path.string());
  return load_taxonomy(in, profile);
}

void write_taxonomy(std::ostream& out, const Taxonomy& taxonomy) {
  out << "@version\t" << taxonomy.version() << '\n';
  out << "#id\taction\tobject\ttarget\tcategories\trefs\n";
  for (const auto& r : taxonomy.requirements()) {
    std::vector<std::string> cats, refs;
    for (const auto& c : r.categories) cats.push_back(c.str());
    for (const auto& ref : r.refs) refs.push_back(ref.str());
    out << r.id.str() << '\t' << to_string(r.action) << '\t' << r.object << '\t' << r.target
        << '\t' << detail::join(cats, ";") << '\t' << detail::join(refs, ";") << '\n';
  }
}

std::vector<Requirement> requirements_by_category(const Taxonomy& taxonomy,
                                                  std::string_view category,
                                                  const std::optional<std::string>& subcategory) {
  CategoryRef ref{std::string(category), subcategory};
  if (!taxonomy.tree().contains(ref)) throw NotFoundError("unknown category " + ref.str());
  std::vector<Requirement> out;
  for (const auto& r : taxonomy.requirements())
    if (r.in_category(category, subcategory)) out.push_back(r);
  return out;
}

TraceBySource trace_requirement(const Taxonomy& taxonomy, RequirementId id) {
  TraceBySource out;
  for (const auto& ref : taxonomy.at(id).refs) out[ref.source].push_back(ref.locator);
  return out;
}

TraceBySource TraceReport::sources() const {
  TraceBySource out;
  for (const auto& entry : entries) {
    for (const auto& [source, locators] : entry.refs) {
      auto& dst = out[source];
      for (const auto& loc : locators)
        if (std::find(dst.begin(), dst.end(), loc) == dst.end()) dst.push_back(loc);
    }
  }
  return out;
}

TraceReport trace_issue(std::string_view issue_id, const LabelSet& labels,
                        const Taxonomy& taxonomy) {
  std::vector<std::string> dangling;
  for (const auto& id : labels)
    if (!taxonomy.contains(id)) dangling.push_back("unknown requirement " + id.str());
  if (!dangling.empty()) throw ValidationError(std::move(dangling));
  TraceReport report{std::string(issue_id), {}};
  for (const auto& id : labels) {
    report.entries.push_back({id, taxonomy.at(id).text(), trace_requirement(taxonomy, id)});
  }
  return report;
}

}  // namespace privlens::taxonomy
