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

#ifndef PRIVLENS_SERVICE_HPP_
#define PRIVLENS_SERVICE_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace privlens::service {

// Environment variables read by ServiceConfig::from_env.
inline constexpr const char* kEnvStore = "PRIVLENS_STORE";
inline constexpr const char* kEnvBind = "PRIVLENS_BIND";  // host:port
inline constexpr const char* kEnvCorsOrigins = "PRIVLENS_CORS_ORIGINS";  // comma list
inline constexpr const char* kEnvTaxonomy = "PRIVLENS_TAXONOMY";
inline constexpr const char* kEnvCorpus = "PRIVLENS_CORPUS";

struct ServiceConfig {
  std::filesystem::path store;  // journal file
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::vector<std::string> cors_origins;
  std::filesystem::path taxonomy;
  std::optional<std::filesystem::path> corpus;

  // Sets host and port from "host:port"; port must be 0..65535.
  void set_bind(std::string_view bind);

  // Overlays set environment variables on `base`.
  static ServiceConfig from_env(ServiceConfig base);
  static ServiceConfig from_env();
};

// HTTP adapter over the workflow store and the analysis modules, mounted
// under /v1. Holds no derived state.
class Service {
 public:
  // Loads taxonomy, corpus and journal; throws on any of them failing.
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the bound port. Throws IoError.
  int bind();
  // Serves until stop(); binds first if needed.
  void listen();
  // Unblocks listen() and flushes the journal.
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace privlens::service

#endif  // PRIVLENS_SERVICE_HPP_
