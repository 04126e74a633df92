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

#ifndef PRIVLENS_GOLD_HPP_
#define PRIVLENS_GOLD_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privlens/requirement_id.hpp"

namespace privlens {

enum class Resolution { kUnanimous, kCombined, kReclassified };

std::string_view to_string(Resolution resolution);
std::optional<Resolution> parse_resolution(std::string_view text);

struct GoldEntry {
  std::string project;
  std::string issue_id;
  LabelSet labels;
  Resolution resolution = Resolution::kUnanimous;
  std::optional<std::string> issue_type;

  friend bool operator==(const GoldEntry&, const GoldEntry&) = default;
};

// Finalized issue labels in session issue order.
struct GoldDataset {
  std::vector<GoldEntry> entries;

  friend bool operator==(const GoldDataset&, const GoldDataset&) = default;
};

// One JSON object per line; keys in fixed order, labels sorted by id.
void write_gold(std::ostream& out, const GoldDataset& gold);
std::string gold_to_string(const GoldDataset& gold);
GoldDataset read_gold(std::istream& in);
GoldDataset load_gold_file(const std::filesystem::path& path);

}  // namespace privlens

#endif  // PRIVLENS_GOLD_HPP_
