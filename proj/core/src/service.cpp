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

#include "privlens/service.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "privlens/corpus.hpp"
#include "privlens/error.hpp"
#include "privlens/irr.hpp"
#include "privlens/json_io.hpp"
#include "privlens/stats.hpp"
#include "privlens/taxonomy.hpp"
#include "privlens/workflow.hpp"
#include "text_util.hpp"

namespace privlens::service {

namespace {

using nlohmann::json;

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return 400;
    case ErrorKind::kValidation: return 422;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kState: return 409;
    case ErrorKind::kPermission: return 403;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kUnmergeable: return 422;
    // Only request input reaches assignment, so a config error here is the client's.
    case ErrorKind::kConfig: return 422;
    case ErrorKind::kIo:
    case ErrorKind::kAudit: return 500;
  }
  return 500;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw ParseError("request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON body: ") + e.what());
  }
}

std::vector<std::string> string_array(const json& body, const char* key) {
  std::vector<std::string> out;
  if (!body.contains(key)) return out;
  if (!body[key].is_array()) throw ParseError(std::string(key) + " must be an array", 0, key);
  for (const auto& v : body[key]) {
    if (!v.is_string()) throw ParseError(std::string(key) + " must hold strings", 0, key);
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

void ServiceConfig::set_bind(std::string_view bind) {
  const auto colon = bind.rfind(':');
  int value = -1;
  const char* first = colon == std::string_view::npos ? nullptr : bind.data() + colon + 1;
  const char* last = bind.data() + bind.size();
  if (!first || first == last || colon == 0 || std::from_chars(first, last, value).ptr != last ||
      value < 0 || value > 65535) {
    throw ConfigError("bind address must be host:port, got '" + std::string(bind) + "'");
  }
  host = std::string(bind.substr(0, colon));
  port = value;
}

ServiceConfig ServiceConfig::from_env() { return from_env(ServiceConfig{}); }

ServiceConfig ServiceConfig::from_env(ServiceConfig base) {
  if (const char* v = std::getenv(kEnvStore)) base.store = v;
  if (const char* v = std::getenv(kEnvBind)) {
    try {
      base.set_bind(v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(kEnvBind) + ": " + e.what());
    }
  }
  if (const char* v = std::getenv(kEnvCorsOrigins)) base.cors_origins = detail::split_trimmed(v, ',');
  if (const char* v = std::getenv(kEnvTaxonomy)) base.taxonomy = v;
  if (const char* v = std::getenv(kEnvCorpus)) base.corpus = std::filesystem::path(v);
  return base;
}

struct Service::Impl {
  ServiceConfig config;
  std::shared_ptr<const taxonomy::Taxonomy> taxonomy;
  std::vector<corpus::IssueReport> issues;
  std::unique_ptr<workflow::WorkflowStore> store;
  httplib::Server server;
  int bound_port = -1;
  std::mutex bind_mutex;
  // httplib ignores stop() until its listen loop is running, so stop waits for
  // a listener that has entered, and a listener never enters after a stop.
  std::mutex run_mutex;
  bool stop_requested = false;
  std::atomic<bool> listen_active{false};

  void shutdown() {
    {
      std::lock_guard lock(run_mutex);
      stop_requested = true;
    }
    while (listen_active && !server.is_running()) std::this_thread::yield();
    server.stop();
    store->flush();
  }

  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)) {
    if (config.taxonomy.empty()) throw ConfigError("no taxonomy seed configured");
    if (config.store.empty()) throw ConfigError("no store path configured");
    taxonomy = std::make_shared<const taxonomy::Taxonomy>(
        taxonomy::load_taxonomy_file(config.taxonomy));
    if (config.corpus) issues = corpus::load_corpus_file(*config.corpus);
    store = std::make_unique<workflow::WorkflowStore>(taxonomy, config.store);
    routes();
  }

  bool origin_allowed(const std::string& origin) const {
    for (const auto& o : config.cors_origins)
      if (o == "*" || o == origin) return true;
    return false;
  }

  // Wraps a handler with error translation.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const ConflictError& e) {
        send_json(res,
                  {{"error", e.what()}, {"kind", to_string(e.kind())},
                   {"current_version", e.current_version()}},
                  409);
      } catch (const ValidationError& e) {
        send_json(res, {{"error", e.what()}, {"kind", to_string(e.kind())},
                        {"violations", e.violations()}},
                  status_for(e.kind()));
      } catch (const Error& e) {
        send_json(res, {{"error", e.what()}, {"kind", to_string(e.kind())}}, status_for(e.kind()));
      } catch (const json::exception& e) {
        send_json(res, {{"error", e.what()}, {"kind", "parse"}}, 400);
      }
    };
  }

  const corpus::IssueReport* find_issue(const std::string& id) const {
    for (const auto& i : issues)
      if (i.issue_id == id) return &i;
    return nullptr;
  }

  void routes() {
    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (!origin.empty() && origin_allowed(origin)) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
      }
    });
    server.Options(R"(/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (origin.empty() || !origin_allowed(origin)) {
        res.status = 403;
        return;
      }
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Access-Control-Max-Age", "600");
      res.status = 204;
    });

    server.Get("/v1/taxonomy", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, *taxonomy);
    }));
    server.Get(R"(/v1/taxonomy/([^/]+)/trace)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto id = RequirementId::parse(req.matches[1].str());
                 const auto& r = taxonomy->at(id);
                 send_json(res, {{"id", r.id.str()},
                                 {"text", r.text()},
                                 {"refs", taxonomy::trace_json(taxonomy::trace_requirement(*taxonomy, id))}});
               }));

    server.Get("/v1/issues", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"issues", issues}});
    }));
    server.Get(R"(/v1/issues/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto* issue = find_issue(req.matches[1].str());
                 if (!issue) throw NotFoundError("no issue " + req.matches[1].str());
                 send_json(res, *issue);
               }));

    server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      workflow::SessionSpec spec;
      spec.id = body.value("id", std::string{});
      spec.project = body.value("project", std::string{});
      spec.corpus_ref = body.value("corpus_ref", std::string{});
      spec.coders = string_array(body, "coders");
      spec.issues = string_array(body, "issues");
      if (!body.contains("issues")) {
        for (const auto& i : issues) {
          spec.issues.push_back(i.issue_id);
          if (spec.project.empty()) spec.project = i.project;
        }
      }
      for (const auto& id : spec.issues)
        if (const auto* i = find_issue(id); i && !i->issue_type.empty()) spec.issue_types[id] = i->issue_type;
      if (body.contains("scheme")) {
        auto scheme = workflow::parse_scheme(body["scheme"].get<std::string>());
        if (!scheme) throw ValidationError("unknown assignment scheme");
        spec.policy.scheme = *scheme;
      }
      spec.policy.k = body.value("k", std::size_t{2});
      send_json(res, store->create_session(spec), 201);
    }));
    server.Get("/v1/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"sessions", store->sessions()}});
    }));
    server.Get(R"(/v1/sessions/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto snap = store->snapshot(req.matches[1].str());
                 const auto report = snap.disagreements();
                 send_json(res, {{"session", snap.session},
                                 {"issues", snap.session.issues.size()},
                                 {"pending", report.pending.size()},
                                 {"unanimous", report.unanimous.size()},
                                 {"disagreements", report.disagreements.size()},
                                 {"finals", snap.finals.size()}});
               }));
    server.Get(R"(/v1/sessions/([^/]+)/assignments/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto snap = store->snapshot(req.matches[1].str());
                 const std::string coder = req.matches[2].str();
                 if (std::find(snap.session.coders.begin(), snap.session.coders.end(), coder) ==
                     snap.session.coders.end()) {
                   throw NotFoundError("coder " + coder + " is not in session " + snap.session.id);
                 }
                 json items = json::array();
                 std::size_t completed = 0;
                 for (const auto& issue : snap.session.issues_for(coder)) {
                   json item{{"issue", issue}, {"version", 0}, {"labels", nullptr}};
                   if (auto it = snap.latest.find(issue); it != snap.latest.end()) {
                     if (auto rec = it->second.find(coder); rec != it->second.end()) {
                       item["version"] = rec->second.version;
                       item["labels"] = labels_json(rec->second.labels);
                       ++completed;
                     }
                   }
                   items.push_back(std::move(item));
                 }
                 send_json(res, {{"session", snap.session.id},
                                 {"coder", coder},
                                 {"state", workflow::to_string(snap.session.state)},
                                 {"completed", completed},
                                 {"pending", items.size() - completed},
                                 {"issues", items}});
               }));
    server.Post(R"(/v1/sessions/([^/]+)/issues/([^/]+)/labels)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  const std::string coder = body.value("coder", std::string{});
                  if (coder.empty()) throw ValidationError("coder is required");
                  std::optional<std::uint64_t> base;
                  if (body.contains("base_version") && !body["base_version"].is_null()) {
                    base = body["base_version"].get<std::uint64_t>();
                  }
                  const LabelSet labels = labels_from_json(body.value("labels", json::array()));
                  send_json(res,
                            store->submit_labels(req.matches[1].str(), coder, req.matches[2].str(),
                                                 labels, base),
                            201);
                }));
    server.Get(R"(/v1/sessions/([^/]+)/disagreements)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, store->disagreements(req.matches[1].str()));
               }));
    server.Post(R"(/v1/sessions/([^/]+)/adjudication)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  send_json(res, store->start_adjudication(req.matches[1].str()));
                }));
    server.Post(R"(/v1/sessions/([^/]+)/issues/([^/]+)/adjudicate)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  std::optional<Resolution> resolution;
                  if (body.contains("resolution") && !body["resolution"].is_null()) {
                    resolution = parse_resolution(body["resolution"].get<std::string>());
                    if (!resolution) throw ValidationError("unknown resolution kind");
                  }
                  send_json(res, store->adjudicate(req.matches[1].str(), req.matches[2].str(),
                                                   labels_from_json(body.at("labels")), resolution,
                                                   string_array(body, "adjudicators"),
                                                   body.value("note", std::string{})));
                }));
    server.Post(R"(/v1/sessions/([^/]+)/finalize)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto out = store->finalize(req.matches[1].str());
                  send_json(res, {{"gold", out.gold.entries}});
                }));
    server.Get(R"(/v1/sessions/([^/]+)/gold)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(gold_to_string(store->gold(req.matches[1].str()).gold),
                                 "application/x-ndjson");
               }));
    server.Get(R"(/v1/sessions/([^/]+)/irr)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto snap = store->snapshot(req.matches[1].str());
                 auto kind = irr::parse_distance(
                     req.has_param("distance") ? req.get_param_value("distance") : "masi");
                 if (!kind) throw ValidationError("unknown distance");
                 const auto distance = irr::distance_function(*kind);
                 const auto units = snap.units();
                 json body{{"session", snap.session.id}, {"distance", irr::to_string(*kind)}};
                 if (req.has_param("pair")) {
                   const auto pair = detail::split_trimmed(req.get_param_value("pair"), ',');
                   if (pair.size() != 2) throw ValidationError("pair must name two coders");
                   body["pair"] = pair;
                   body["result"] = irr::pairwise_alpha(units, pair[0], pair[1], distance);
                 } else {
                   body["result"] = irr::krippendorff_alpha(units, distance);
                 }
                 const auto report = snap.disagreements();
                 body["total_agreement"] =
                     report.pending.empty() ? json(snap.percent_total_agreement()) : json(nullptr);
                 send_json(res, body);
               }));

    server.Get("/v1/reports/coverage", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("session")) throw ValidationError("session parameter is required");
      const auto gold = store->gold(req.get_param_value("session")).gold;
      json body{{"session", req.get_param_value("session")},
                {"coverage", stats::coverage_by_category(gold, *taxonomy)}};
      const std::size_t k = req.has_param("k") ? std::stoul(req.get_param_value("k")) : 10;
      body["top"] = stats::top_requirements(gold, k, true);
      send_json(res, body);
    }));
    server.Get("/v1/reports/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
      if (issues.empty()) throw NotFoundError("no corpus configured");
      send_json(res, {{"issues", issues.size()}, {"stats", corpus::descriptive_stats(issues)}});
    }));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
  if (impl_) impl_->shutdown();
}

int Service::bind() {
  std::lock_guard lock(impl_->bind_mutex);
  if (impl_->bound_port >= 0) return impl_->bound_port;
  const auto& host = impl_->config.host;
  if (impl_->config.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, impl_->config.port)) {
    impl_->bound_port = impl_->config.port;
  }
  if (impl_->bound_port < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(impl_->config.port));
  }
  return impl_->bound_port;
}

void Service::listen() {
  bind();
  {
    std::lock_guard lock(impl_->run_mutex);
    if (impl_->stop_requested) return;
    impl_->listen_active = true;
  }
  impl_->server.listen_after_bind();
  impl_->listen_active = false;
}

void Service::stop() { impl_->shutdown(); }

int Service::port() const { return impl_->bound_port; }

}  // namespace privlens::service
