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

#ifndef PRIVLENS_ERROR_HPP_
#define PRIVLENS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace privlens {

enum class ErrorKind {
  kParse,
  kValidation,
  kNotFound,
  kState,
  kPermission,
  kConflict,
  kConfig,
  kIo,
  kAudit,
  kUnmergeable,
};

const char* to_string(ErrorKind kind);

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed input. `line` is 1-based; 0 means "not line oriented".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::string field = {});

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// One or more violated invariants. Validators collect every violation
// before throwing.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  explicit ValidationError(const std::string& violation)
      : ValidationError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message)
      : Error(ErrorKind::kNotFound, message) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& message)
      : Error(ErrorKind::kState, message) {}
};

class PermissionError : public Error {
 public:
  explicit PermissionError(const std::string& message)
      : Error(ErrorKind::kPermission, message) {}
};

// Optimistic-concurrency rejection; the caller should reload and retry.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, unsigned long long current_version)
      : Error(ErrorKind::kConflict, message), current_version_(current_version) {}

  unsigned long long current_version() const noexcept { return current_version_; }

 private:
  unsigned long long current_version_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::kConfig, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::kIo, message) {}
};

class AuditError : public Error {
 public:
  explicit AuditError(const std::string& message)
      : Error(ErrorKind::kAudit, message) {}
};

}  // namespace privlens

#endif  // PRIVLENS_ERROR_HPP_
