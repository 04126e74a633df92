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

#include "privlens/requirement_id.hpp"

#include <charconv>
#include <limits>

#include "privlens/error.hpp"

namespace privlens {

bool RequirementId::is_valid(std::string_view text) noexcept {
  if (text.size() < 2 || text.front() != 'R' || text[1] == '0') return false;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

RequirementId RequirementId::parse(std::string_view text) {
  if (!is_valid(text)) {
    throw ParseError("invalid requirement id '" + std::string(text) + "'");
  }
  std::uint32_t value = 0;
  std::from_chars(text.data() + 1, text.data() + text.size(), value);
  return RequirementId(value);
}

RequirementId::RequirementId(std::uint32_t number) : number_(number) {
  if (number == 0) throw ParseError("requirement numbers start at 1");
}

LabelSet parse_label_set(std::string_view text) {
  LabelSet out;
  std::size_t i = 0;
  auto separator = [](char c) {
    return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  };
  while (i < text.size()) {
    while (i < text.size() && separator(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !separator(text[j])) ++j;
    if (j > i) out.insert(RequirementId::parse(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::string format_label_set(const LabelSet& labels, std::string_view sep) {
  std::string out;
  for (const auto& id : labels) {
    if (!out.empty()) out.append(sep);
    out += id.str();
  }
  return out;
}

std::vector<std::string> to_strings(const LabelSet& labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& id : labels) out.push_back(id.str());
  return out;
}

}  // namespace privlens
