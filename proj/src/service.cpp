//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/service.h"

#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "mech/layout.h"
#include "mech/taskgen.h"

namespace mech {

using Json = nlohmann::json;

namespace {

struct HttpError {
  int status;
  Json payload;
};

[[noreturn]] void fail(int status, const std::string &error, const std::string &msg) {
  throw HttpError { status, { { "error", error }, { "message", msg } } };
}

std::string require_string(const Json &body, const char *key) {
  if (!body.is_object() || !body.contains(key) || !body[key].is_string())
    fail(400, "bad-request", std::string("missing string field '") + key + "'");
  return body[key].get<std::string>();
}

int int_field(const Json &body, const char *key, int fallback) {
  if (!body.is_object() || !body.contains(key))
    return fallback;
  if (!body[key].is_number_integer())
    fail(400, "bad-request", std::string("field '") + key + "' must be an integer");
  return body[key].get<int>();
}

Json state_json(const State &s) {
  return { { "mapped", s.smiles(MapMode::kAll) },
           { "canonical", s.canonical() },
           { "species", s.species() } };
}

Json violations_json(const std::vector<Violation> &vs) {
  Json out = Json::array();
  for (const Violation &v: vs)
    out.push_back({ { "atom", v.atom },
                    { "map", v.map },
                    { "kind", to_string(v.kind) },
                    { "message", v.message } });
  return out;
}

Json graph_json(const MolGraph &g, const std::vector<Point> *coords = nullptr) {
  Json atoms = Json::array(), bonds = Json::array();
  for (int i = 0; i < g.num_atoms(); ++i) {
    const Atom &a = g.atom(i);
    Json j { { "index", i },
             { "element", std::string(element(a.element).symbol) },
             { "charge", a.charge },
             { "hcount", a.hcount },
             { "map", a.map } };
    if (coords != nullptr) {
      j["x"] = (*coords)[i].x;
      j["y"] = (*coords)[i].y;
    }
    atoms.push_back(std::move(j));
  }
  for (const Bond &b: g.bonds())
    bonds.push_back({ { "a", b.a }, { "b", b.b }, { "order", b.order } });
  return { { "atoms", atoms }, { "bonds", bonds } };
}

std::vector<std::string> split_path(const std::string &path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '/');)
    if (!p.empty())
      parts.push_back(p);
  return parts;
}

bool valid_id(const std::string &id) {
  static const std::regex re("[A-Za-z0-9_-]{1,64}");
  return std::regex_match(id, re);
}

std::string fresh_id() {
  static std::mutex mu;
  static std::mt19937_64 rng(std::random_device {}());
  std::lock_guard lock(mu);
  std::ostringstream os;
  os << std::hex << rng();
  return os.str();
}

// Replays the committed steps; the stored document never holds state that
// cannot be rebuilt from them.
Mechanism session_mechanism(const Json &s) {
  const State initial = State::parse(s["initial"].get<std::string>());
  std::vector<MechStep> steps;
  for (const Json &t: s["steps"])
    steps.push_back(parse_mechsmiles(t.get<std::string>()));
  Mechanism m = replay_steps(initial, steps);
  m.reaction_id = s["session_id"].get<std::string>();
  m.source_format = "annotation";
  m.meta = s.value("meta", Json::object());
  return m;
}

bool complete(const Json &s, const State &current) {
  const std::string products = s["reaction"].value("products", "");
  if (products.empty())
    return false;
  Mechanism target;
  target.initial = State::parse(products, false);
  const auto want = goal_species(main_product(target));
  return goal_reached(current, want);
}

Json session_view(const Json &s) {
  const Mechanism m = session_mechanism(s);
  Json view = s;
  view["current"] = state_json(m.goal());
  view["status"] = complete(s, m.goal()) ? "complete" : "in-progress";
  view["can_undo"] = !s["steps"].empty();
  view["can_redo"] = !s["redo"].empty();
  return view;
}

HttpResponse ok(const Json &j, int status = 200) {
  return { status, j.dump(), "application/json" };
}

} // namespace

Service::Service(ServiceConfig cfg): cfg_(std::move(cfg)) {
  std::filesystem::create_directories(cfg_.session_dir);
}

Service::~Service() = default;

std::filesystem::path Service::session_path(const std::string &id) const {
  return cfg_.session_dir / (id + ".json");
}

std::shared_ptr<std::mutex> Service::session_lock(const std::string &id) {
  std::lock_guard lock(locks_mu_);
  auto &p = locks_[id];
  if (!p)
    p = std::make_shared<std::mutex>();
  return p;
}

Json Service::load_session(const std::string &id) const {
  if (!valid_id(id))
    fail(404, "not-found", "no session '" + id + "'");
  std::ifstream in(session_path(id));
  if (!in)
    fail(404, "not-found", "no session '" + id + "'");
  return Json::parse(in);
}

void Service::save_session(const Json &s) const {
  const std::string id = s["session_id"].get<std::string>();
  const auto path = session_path(id);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << s.dump(2) << '\n';
    out.flush();
    if (!out)
      fail(500, "storage-error", "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Policy &Service::policy() {
  std::lock_guard lock(policy_mu_);
  if (!policy_)
    policy_ = make_policy(cfg_.policy);
  return *policy_;
}

HttpResponse Service::handle(const std::string &method, const std::string &path,
                             const std::string &body) {
  try {
    Json j = Json::object();
    if (!body.empty()) {
      try {
        j = Json::parse(body);
      } catch (const Json::exception &e) {
        fail(400, "bad-request", std::string("malformed JSON: ") + e.what());
      }
    }
    return dispatch(method, path, j);
  } catch (const HttpError &e) {
    return ok(e.payload, e.status);
  } catch (const ParseError &e) {
    return ok({ { "error", "parse-error" },
                { "kind", to_string(e.kind()) },
                { "offset", e.offset() },
                { "message", e.what() } },
              422);
  } catch (const ApplyError &e) {
    Json j { { "error", "apply-error" },
             { "kind", to_string(e.kind()) },
             { "message", e.what() },
             { "violations", violations_json(e.violations()) } };
    if (e.arrow())
      j["arrow"] = e.arrow()->to_string();
    return ok(j, 422);
  } catch (const ConvertError &e) {
    return ok({ { "error", "convert-error" }, { "reason", e.reason() }, { "message", e.what() } },
              422);
  } catch (const Error &e) {
    return ok({ { "error", "engine-error" }, { "message", e.what() } }, 422);
  } catch (const Json::exception &e) {
    return ok({ { "error", "bad-request" }, { "message", e.what() } }, 400);
  } catch (const std::exception &e) {
    return ok({ { "error", "internal" }, { "message", e.what() } }, 500);
  }
}

HttpResponse Service::dispatch(const std::string &method, const std::string &path,
                               const Json &body) {
  const auto parts = split_path(path);
  if (parts.empty())
    fail(404, "not-found", "no route " + path);
  if (parts[0] == "sessions")
    return sessions(method, parts, body);
  if (parts.size() != 1)
    fail(404, "not-found", "no route " + path);
  const std::string &route = parts[0];
  if (method == "GET" && route == "health")
    return ok({ { "status", "ok" } });
  if (method != "POST")
    fail(405, "method-not-allowed", method + " " + path);

  if (route == "parse") {
    if (body.contains("mechsmiles")) {
      const MechStep step = parse_mechsmiles(require_string(body, "mechsmiles"));
      Json arrows = Json::array();
      for (const Arrow &a: step.arrows)
        arrows.push_back(a.to_string());
      return ok({ { "host", write_smiles(step.host, MapMode::kAll) },
                  { "canonical", canonical_form(step.host) },
                  { "arrows", arrows },
                  { "minimal", serialize(step, Scope::kMinimal) },
                  { "is_minimal", step.is_minimal() } });
    }
    const State s = State::parse(require_string(body, "smiles"), false);
    const StabilityReport report = validate(s.graph());
    Json j = state_json(s);
    j["graph"] = graph_json(s.graph());
    j["stable"] = report.stable();
    j["violations"] = violations_json(report.violations);
    return ok(j);
  }
  if (route == "layout") {
    MolGraph g = parse_smiles(require_string(body, "smiles"));
    if (body.value("explicit_hydrogens", false))
      g = with_explicit_hydrogens(g);
    const auto coords = layout_2d(g);
    return ok(graph_json(g, &coords));
  }
  if (route == "apply") {
    State pre;
    std::vector<Arrow> arrows;
    if (body.contains("mechsmiles")) {
      const MechStep step = parse_mechsmiles(require_string(body, "mechsmiles"));
      pre = State::from_graph(step.host);
      arrows = step.arrows;
    } else {
      pre = State::parse(require_string(body, "state"));
      arrows = parse_arrows(require_string(body, "arrows"));
    }
    const State next = apply_move(pre, arrows);
    Json j = state_json(next);
    j["stable"] = true;
    j["violations"] = Json::array();
    return ok(j);
  }
  if (route == "enumerate") {
    const State s = State::parse(require_string(body, "smiles"));
    EnumerateOptions eo;
    eo.max_arrows = std::clamp(int_field(body, "max_arrows", 2), 1, 4);
    const int limit = std::max(0, int_field(body, "limit", 100));
    const auto moves = enumerate_moves(s, eo);
    Json out = Json::array();
    for (const MoveSet &mv: moves) {
      if (static_cast<int>(out.size()) >= limit)
        break;
      out.push_back({ { "arrows", format_arrows(mv.arrows) },
                      { "mechsmiles", serialize(make_step(s, mv.arrows), Scope::kMinimal) },
                      { "product", apply_move(s, mv.arrows).canonical() } });
    }
    return ok({ { "count", moves.size() }, { "moves", out } });
  }
  if (route == "infer-arrows") {
    const Inference inf = infer_arrows(parse_smiles(require_string(body, "reactants")),
                                       parse_smiles(require_string(body, "products")));
    const MechStep step { inf.reactant, inf.arrows };
    return ok({ { "arrows", format_arrows(inf.arrows) },
                { "mechsmiles", serialize(step, Scope::kMinimal) } });
  }
  if (route == "search") {
    const State s = State::parse(require_string(body, "reactants"));
    const std::string product = require_string(body, "product");
    SearchConfig sc = cfg_.search;
    sc.budget = int_field(body, "budget", sc.budget);
    sc.top_k = int_field(body, "top_k", sc.top_k);
    sc.max_children = int_field(body, "max_children", sc.max_children);
    const Validation v = validate_reaction(s, product, policy(), sc);
    Json j { { "validated", v.validated },
             { "expansions", v.expansions },
             { "report", v.report } };
    if (v.mechanism)
      j["mechanism"] = to_json(*v.mechanism);
    return ok(j);
  }
  fail(404, "not-found", "no route " + path);
}

HttpResponse Service::sessions(const std::string &method,
                               const std::vector<std::string> &parts, const Json &body) {
  if (parts.size() == 1) {
    if (method != "POST")
      fail(405, "method-not-allowed", method + " /sessions");
    const std::string reactants = require_string(body, "reactants");
    std::string id = body.contains("session_id") ? require_string(body, "session_id")
                                                 : fresh_id();
    if (!valid_id(id))
      fail(400, "bad-request", "invalid session id");
    auto lock = session_lock(id);
    std::lock_guard guard(*lock);
    if (std::filesystem::exists(session_path(id)))
      fail(409, "conflict", "session '" + id + "' exists");
    const State initial = State::parse(reactants);
    Json s { { "session_id", id },
             { "reaction",
               { { "reactants", reactants }, { "products", body.value("products", "") } } },
             { "initial", initial.smiles(MapMode::kAll) },
             { "steps", Json::array() },
             { "redo", Json::array() },
             { "meta", body.value("meta", Json::object()) } };
    save_session(s);
    return ok(session_view(s), 201);
  }

  const std::string &id = parts[1];
  auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  if (parts.size() == 2) {
    if (method == "GET")
      return ok(session_view(load_session(id)));
    if (method == "DELETE") {
      load_session(id);
      std::filesystem::remove(session_path(id));
      return ok({ { "deleted", id } });
    }
    fail(405, "method-not-allowed", method + " /sessions/" + id);
  }
  if (parts.size() != 3 || method != "POST")
    fail(404, "not-found", "no route");
  const std::string &action = parts[2];
  Json s = load_session(id);

  if (action == "steps") {
    const Mechanism m = session_mechanism(s);
    const State &cur = m.goal();
    std::vector<Arrow> arrows;
    if (body.contains("mechsmiles"))
      arrows = resolve_step(cur, parse_mechsmiles(require_string(body, "mechsmiles")));
    else
      arrows = parse_arrows(require_string(body, "arrows"));
    apply_move(cur, arrows);
    s["steps"].push_back(serialize(make_step(cur, arrows), Scope::kMinimal));
    s["redo"] = Json::array();
    save_session(s);
    return ok(session_view(s));
  }
  if (action == "undo") {
    if (s["steps"].empty())
      fail(409, "conflict", "nothing to undo");
    s["redo"].push_back(s["steps"].back());
    s["steps"].erase(s["steps"].size() - 1);
    save_session(s);
    return ok(session_view(s));
  }
  if (action == "redo") {
    if (s["redo"].empty())
      fail(409, "conflict", "nothing to redo");
    s["steps"].push_back(s["redo"].back());
    s["redo"].erase(s["redo"].size() - 1);
    save_session(s);
    return ok(session_view(s));
  }
  if (action == "export") {
    const Mechanism m = session_mechanism(s);
    std::string out;
    if (body.value("format", "") == "mechanism") {
      out = to_json(m).dump() + "\n";
    } else {
      const std::string task_name = body.contains("task") && body["task"].is_number_integer()
                                        ? std::to_string(body["task"].get<int>())
                                        : body.value("task", "4");
      const auto task = parse_task(task_name);
      if (!task)
        fail(400, "bad-request", "unknown task '" + task_name + "'");
      TaskOptions to;
      to.retro = body.value("retro", true);
      to.forward = body.value("forward", true);
      to.no_product = body.value("no_product", true);
      for (const TaskSample &t: build_samples(m, *task, to))
        out += to_json(t).dump() + "\n";
    }
    return { 200, out, "application/x-ndjson" };
  }
  fail(404, "not-found", "no action '" + action + "'");
}

void Service::mount(httplib::Server &server) {
  auto route = [this](const httplib::Request &req, httplib::Response &res) {
    const HttpResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", route);
  server.Post(".*", route);
  server.Delete(".*", route);
}

} // namespace mech
