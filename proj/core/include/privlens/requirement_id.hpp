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

#ifndef PRIVLENS_REQUIREMENT_ID_HPP_
#define PRIVLENS_REQUIREMENT_ID_HPP_

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace privlens {

// Stable requirement identifier of the form "R<n>". Ordering is numeric, so
// R2 sorts before R10.
class RequirementId {
 public:
  RequirementId() = default;

  // Throws ParseError for anything that is not "R" followed by digits.
  static RequirementId parse(std::string_view text);
  static bool is_valid(std::string_view text) noexcept;

  explicit RequirementId(std::uint32_t number);

  std::uint32_t number() const noexcept { return number_; }
  std::string str() const { return "R" + std::to_string(number_); }

  friend auto operator<=>(const RequirementId&, const RequirementId&) = default;

 private:
  std::uint32_t number_ = 0;
};

using LabelSet = std::set<RequirementId>;

// Accepts "R1,R2", "R1;R2", whitespace separated or empty text.
LabelSet parse_label_set(std::string_view text);
std::string format_label_set(const LabelSet& labels, std::string_view sep = ",");
std::vector<std::string> to_strings(const LabelSet& labels);

}  // namespace privlens

#endif  // PRIVLENS_REQUIREMENT_ID_HPP_
