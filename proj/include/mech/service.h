//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "mech/search.h"

namespace httplib {
class Server;
}

namespace mech {

struct ServiceConfig {
  std::filesystem::path session_dir = "sessions";
  // Policy spec for /search, as accepted by make_policy().
  std::string policy;
  SearchConfig search;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// JSON-over-HTTP facade. handle() is the whole API and carries no
// per-connection state; mount() routes an httplib server onto it.
class Service {
public:
  explicit Service(ServiceConfig cfg);
  ~Service();

  HttpResponse handle(const std::string &method, const std::string &path,
                      const std::string &body);

  void mount(httplib::Server &server);

private:
  using Json = nlohmann::json;

  HttpResponse dispatch(const std::string &method, const std::string &path,
                        const Json &body);
  HttpResponse sessions(const std::string &method,
                        const std::vector<std::string> &parts, const Json &body);

  Json load_session(const std::string &id) const;
  void save_session(const Json &s) const;
  std::filesystem::path session_path(const std::string &id) const;
  std::shared_ptr<std::mutex> session_lock(const std::string &id);
  Policy &policy();

  ServiceConfig cfg_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mutex policy_mu_;
  std::unique_ptr<Policy> policy_;
};

} // namespace mech
