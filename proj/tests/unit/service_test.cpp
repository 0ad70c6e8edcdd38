//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "mech/service.h"
#include "mech/taskgen.h"
#include "test_util.h"

using namespace mech;
using nlohmann::json;

namespace {

Mechanism load(const std::string &name) {
  std::istringstream in(test::slurp(test::data_path(name)));
  return read_mechanisms(in).front();
}

json load_json(const std::string &name) {
  return json::parse(test::slurp(test::data_path(name)));
}

std::filesystem::path scratch_dir(const std::string &tag) {
  auto dir = std::filesystem::temp_directory_path()
             / ("mech_service_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

struct Call {
  int status;
  json body;
};

Call call(Service &svc, const std::string &method, const std::string &path,
          const json &body = json::object()) {
  const HttpResponse r = svc.handle(method, path, body.dump());
  if (r.content_type == "application/json")
    return { r.status, json::parse(r.body) };
  return { r.status, r.body };
}

} // namespace

TEST_CASE("apply endpoint") {
  Service svc({ scratch_dir("apply") });
  const json fixture = load_json("hydride_step.jsonl");
  auto r = call(svc, "POST", "/apply", { { "mechsmiles", fixture["steps"][0] } });
  REQUIRE(r.status == 200);
  CHECK(r.body["canonical"] == "B.CC(=O)CCCC[O-]");
  CHECK(r.body["species"] == json { "B", "CC(=O)CCCC[O-]" });
  CHECK(r.body["stable"] == true);

  r = call(svc, "POST", "/apply", { { "state", "CC=O.[OH-]" }, { "arrows", "" } });
  REQUIRE(r.status == 200);
  CHECK(r.body["canonical"] == State::parse("CC=O.[OH-]").canonical());

  r = call(svc, "POST", "/apply", { { "mechsmiles", "[CH4:1].[OH2:2]|(1,2)" } });
  CHECK(r.status == 422);
  CHECK(r.body["error"] == "apply-error");
  CHECK(r.body["kind"] == "no-lone-pair");

  r = call(svc, "POST", "/apply", { { "mechsmiles", "[OH2:1].[CH3+:2]|((1,3),2)" } });
  CHECK(r.status == 422);
  CHECK(r.body["error"] == "parse-error");

  r = call(svc, "POST", "/apply", { { "state", "C=O.[OH-]" }, { "arrows", "(2,1)" } });
  CHECK(r.status == 422);
  CHECK(r.body["kind"] == "unstable-product");
  CHECK(!r.body["violations"].empty());

  CHECK(svc.handle("POST", "/apply", "{not json").status == 400);
  CHECK(call(svc, "POST", "/nowhere").status == 404);
  CHECK(call(svc, "GET", "/health").body["status"] == "ok");
}

TEST_CASE("parse, layout, enumerate and infer endpoints") {
  Service svc({ scratch_dir("misc") });
  auto r = call(svc, "POST", "/parse", { { "smiles", "CC(=O" } });
  CHECK(r.status == 422);
  CHECK(r.body["error"] == "parse-error");
  CHECK(r.body["offset"].get<int>() >= 0);

  r = call(svc, "POST", "/parse", { { "smiles", "[CH3+]" } });
  REQUIRE(r.status == 200);
  CHECK(r.body["stable"] == true);
  r = call(svc, "POST", "/parse", { { "smiles", "[CH3]" } });
  CHECK(r.body["stable"] == false);

  r = call(svc, "POST", "/parse", { { "mechsmiles", "[OH-:1].[H:2][OH:3]|(1,2);((2,3),3)" } });
  REQUIRE(r.status == 200);
  CHECK(r.body["arrows"].size() == 2);

  const json req { { "smiles", "Cc1ccccc1CCO" } };
  const auto a = call(svc, "POST", "/layout", req);
  const auto b = call(svc, "POST", "/layout", req);
  REQUIRE(a.status == 200);
  CHECK(a.body == b.body);
  const json &atoms = a.body["atoms"];
  for (const json &bond: a.body["bonds"]) {
    const json &p = atoms[bond["a"].get<int>()];
    const json &q = atoms[bond["b"].get<int>()];
    const double d = std::hypot(p["x"].get<double>() - q["x"].get<double>(),
                                p["y"].get<double>() - q["y"].get<double>());
    CHECK(d == doctest::Approx(1.0).epsilon(1e-3));
  }

  r = call(svc, "POST", "/enumerate", { { "smiles", "[OH-].O" }, { "max_arrows", 2 }, { "limit", 3 } });
  REQUIRE(r.status == 200);
  CHECK(r.body["count"] == enumerate_moves(State::parse("[OH-].O"), { 2, nullptr }).size());
  CHECK(r.body["moves"].size() == 3);

  r = call(svc, "POST", "/infer-arrows",
           { { "reactants", "[OH-:1].[H:2][OH:3]" }, { "products", "[H:2][OH:1].[OH-:3]" } });
  REQUIRE(r.status == 200);
  CHECK(r.body["arrows"] == "(1,2);((2,3),3)");
}

TEST_CASE("annotation sessions") {
  const auto dir = scratch_dir("sessions");
  const Mechanism fixture = load("borohydride.jsonl");
  const json fj = load_json("borohydride.jsonl");
  std::string id;
  {
    Service svc({ dir });
    auto r = call(svc, "POST", "/sessions",
                  { { "reactants", fj["initial_smiles"] }, { "products", "CC(O)CCCCO" } });
    REQUIRE(r.status == 201);
    id = r.body["session_id"];
    CHECK(r.body["status"] == "in-progress");

    for (const json &step: fj["steps"]) {
      r = call(svc, "POST", "/sessions/" + id + "/steps", { { "mechsmiles", step } });
      REQUIRE(r.status == 200);
    }
    CHECK(r.body["status"] == "complete");
    CHECK(r.body["current"]["canonical"] == fixture.goal().canonical());

    // A bad arrow leaves the session untouched.
    r = call(svc, "POST", "/sessions/" + id + "/steps", { { "arrows", "(11,2)" } });
    CHECK(r.status == 422);
    CHECK(call(svc, "GET", "/sessions/" + id).body["steps"].size() == 4);

    r = call(svc, "POST", "/sessions/" + id + "/undo");
    CHECK(r.body["steps"].size() == 3);
    CHECK(r.body["status"] == "in-progress");
    r = call(svc, "POST", "/sessions/" + id + "/redo");
    CHECK(r.body["steps"].size() == 4);
    CHECK(call(svc, "POST", "/sessions/" + id + "/redo").status == 409);
  }
  // A fresh process sees the same session.
  Service svc({ dir });
  auto r = call(svc, "GET", "/sessions/" + id);
  REQUIRE(r.status == 200);
  CHECK(r.body["current"]["canonical"] == fixture.goal().canonical());

  for (int task = 1; task <= 4; ++task) {
    const HttpResponse e = svc.handle("POST", "/sessions/" + id + "/export",
                                      json { { "task", task } }.dump());
    REQUIRE(e.status == 200);
    Mechanism m = fixture;
    m.reaction_id = id;
    std::string want;
    for (const TaskSample &t: build_samples(m, static_cast<Task>(task)))
      want += to_json(t).dump() + "\n";
    CHECK(e.body == want);
  }

  CHECK(call(svc, "GET", "/sessions/missing").status == 404);
  CHECK(call(svc, "POST", "/sessions/missing/steps", { { "arrows", "(1,2)" } }).status == 404);
  CHECK(call(svc, "GET", "/sessions/..%2f").status == 404);
  CHECK(call(svc, "DELETE", "/sessions/" + id).status == 200);
  CHECK(call(svc, "GET", "/sessions/" + id).status == 404);
  std::filesystem::remove_all(dir);
}

TEST_CASE("service over HTTP with concurrent writers") {
  const auto dir = scratch_dir("http");
  Service svc({ dir });
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/sessions", json { { "reactants", "[OH-].O.O.O.O" }, { "session_id", "shared" } }.dump(),
                      "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);

  // Proton shuttles between waters; every commit must land whatever the
  // interleaving, since the step matches any hydroxide/water pair.
  const State s0 = State::parse("[OH-].O.O.O.O");
  const std::string shuttle = "[OH-:1].[H:2][OH:3]|(1,2);((2,3),3)";
  std::vector<std::thread> writers;
  for (int t = 0; t < 4; ++t) {
    writers.emplace_back([&] {
      httplib::Client c("127.0.0.1", port);
      for (int k = 0; k < 3; ++k) {
        auto r = c.Post("/sessions/shared/steps", json { { "mechsmiles", shuttle } }.dump(),
                        "application/json");
        REQUIRE(r);
        CHECK(r->status == 200);
      }
    });
  }
  for (auto &w: writers)
    w.join();
  auto view = cli.Get("/sessions/shared");
  REQUIRE(view);
  const json v = json::parse(view->body);
  CHECK(v["steps"].size() == 12);
  CHECK(v["current"]["canonical"] == s0.canonical());

  res = cli.Post("/apply", json { { "mechsmiles", shuttle } }.dump(),
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);

  server.stop();
  th.join();
  std::filesystem::remove_all(dir);
}

TEST_CASE("external policy over HTTP and the search endpoint") {
  httplib::Server policy_server;
  json last_request;
  policy_server.Post("/propose", [&](const httplib::Request &req, httplib::Response &res) {
    last_request = json::parse(req.body);
    res.set_content(R"js({"proposals":[{"mechsmiles":"[OH-:1].[H:2][O:3]C(C)=O|(1,2);((2,3),3)","logprob":-0.2}]})js",
                    "application/json");
  });
  const int port = policy_server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { policy_server.listen_after_bind(); });
  policy_server.wait_until_ready();

  const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/propose";
  auto policy = ExternalPolicy::http(url);
  const State s = State::parse("CC(=O)O.[OH-]");
  const SearchResult r = best_first_search(s, "CC(=O)[O-]", *policy);
  CHECK(r.solved);
  CHECK(r.stats.expansions == 1);
  CHECK(last_request["top_k"] == 10);
  CHECK(last_request["goal"] == "CC(=O)[O-]");

  ServiceConfig cfg { scratch_dir("search") };
  cfg.policy = url;
  Service svc(cfg);
  auto res = call(svc, "POST", "/search", { { "reactants", "CC(=O)O.[OH-]" }, { "product", "CC(=O)[O-]" } });
  REQUIRE(res.status == 200);
  CHECK(res.body["validated"] == true);
  CHECK(res.body["mechanism"]["steps"].size() == 1);

  policy_server.stop();
  th.join();

  Service heuristic({ scratch_dir("search2") });
  res = call(heuristic, "POST", "/search",
             { { "reactants", "CC(=O)O.[OH-]" }, { "product", "CC(=O)[O-]" } });
  CHECK(res.body["validated"] == true);
  res = call(heuristic, "POST", "/search", { { "reactants", "CC(=O)O.[OH-]" }, { "product", "CCl" } });
  CHECK(res.body["validated"] == false);
  CHECK(res.body["expansions"] == 0);
}
