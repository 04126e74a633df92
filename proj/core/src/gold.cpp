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

#include "privlens/gold.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "privlens/error.hpp"
#include "text_util.hpp"

namespace privlens {

namespace {

constexpr std::array<std::pair<Resolution, std::string_view>, 3> kResolutions = {{
    {Resolution::kUnanimous, "unanimous"},
    {Resolution::kCombined, "combined"},
    {Resolution::kReclassified, "reclassified"},
}};

}  // namespace

std::string_view to_string(Resolution resolution) {
  for (const auto& [r, name] : kResolutions)
    if (r == resolution) return name;
  return "?";
}

std::optional<Resolution> parse_resolution(std::string_view text) {
  for (const auto& [r, name] : kResolutions)
    if (name == text) return r;
  return std::nullopt;
}

void write_gold(std::ostream& out, const GoldDataset& gold) {
  for (const auto& e : gold.entries) {
    nlohmann::ordered_json j;
    j["project"] = e.project;
    j["issue"] = e.issue_id;
    j["labels"] = to_strings(e.labels);
    j["resolution"] = to_string(e.resolution);
    if (e.issue_type) j["type"] = *e.issue_type;
    out << j.dump() << '\n';
  }
}

std::string gold_to_string(const GoldDataset& gold) {
  std::ostringstream out;
  write_gold(out, gold);
  return out.str();
}

GoldDataset read_gold(std::istream& in) {
  GoldDataset gold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), lineno);
    }
    try {
      GoldEntry e;
      e.project = j.value("project", std::string{});
      e.issue_id = j.at("issue").get<std::string>();
      for (const auto& id : j.at("labels")) e.labels.insert(RequirementId::parse(id.get<std::string>()));
      auto resolution = parse_resolution(j.value("resolution", std::string{"unanimous"}));
      if (!resolution) throw ParseError("unknown resolution", lineno, "resolution");
      e.resolution = *resolution;
      if (j.contains("type") && !j["type"].is_null()) e.issue_type = j["type"].get<std::string>();
      gold.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno);
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), lineno, "labels");
    }
  }
  return gold;
}

GoldDataset load_gold_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gold dataset " + path.string());
  return read_gold(in);
}

}  // namespace privlens
