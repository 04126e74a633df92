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

#include "privlens/error.hpp"

#include <utility>

namespace privlens {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kState: return "state";
    case ErrorKind::kPermission: return "permission";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kAudit: return "audit";
    case ErrorKind::kUnmergeable: return "unmergeable";
  }
  return "unknown";
}

namespace {

std::string located(const std::string& message, std::size_t line, const std::string& field) {
  std::string out;
  if (line) out += "line " + std::to_string(line) + ": ";
  if (!field.empty()) out += field + ": ";
  return out + message;
}

std::string joined(const std::vector<std::string>& violations) {
  if (violations.empty()) return "validation failed";
  std::string out = violations.front();
  for (std::size_t i = 1; i < violations.size(); ++i) out += "; " + violations[i];
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::string field)
    : Error(ErrorKind::kParse, located(message, line, field)),
      line_(line),
      field_(std::move(field)) {}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(ErrorKind::kValidation, joined(violations)), violations_(std::move(violations)) {}

}  // namespace privlens
