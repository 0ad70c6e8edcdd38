//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "mech/applications.h"
#include "mech/convert.h"
#include "mech/engine.h"
#include "mech/search.h"
#include "mech/service.h"
#include "mech/taskgen.h"

using namespace mech;
using Json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

// Thrown for bad flag values discovered after CLI11 parsing.
struct UsageError: std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_json(const Json &j) { std::cout << j.dump() << '\n'; }

// Input text with a caret under the failing byte.
void diagnose(const std::string &input, const ParseError &e) {
  std::cerr << "error: " << e.what() << '\n'
            << "  " << input << '\n'
            << "  " << std::string(std::min(e.offset(), input.size()), ' ') << "^\n";
}

class Input {
public:
  explicit Input(const std::string &path) {
    if (path == "-") {
      in_ = &std::cin;
    } else {
      file_.open(path);
      if (!file_)
        throw UsageError("cannot open " + path);
      in_ = &file_;
    }
  }
  std::istream &stream() { return *in_; }

private:
  std::ifstream file_;
  std::istream *in_;
};

class Output {
public:
  explicit Output(const std::string &path) {
    if (path.empty() || path == "-") {
      out_ = &std::cout;
    } else {
      file_.open(path);
      if (!file_)
        throw UsageError("cannot write " + path);
      out_ = &file_;
    }
  }
  std::ostream &stream() { return *out_; }
  bool is_stdout() const { return out_ == &std::cout; }

private:
  std::ofstream file_;
  std::ostream *out_;
};

// Streams unified JSONL records one at a time; `id` selects a single record.
template <class F>
void for_each_mechanism(const std::string &path, const std::string &id, F &&fn) {
  Input in(path);
  std::string line;
  while (std::getline(in.stream(), line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const Json j = Json::parse(line);
    if (!id.empty() && j.value("reaction_id", "") != id)
      continue;
    fn(mechanism_from_json(j));
  }
}

Task task_flag(int t) {
  const auto task = parse_task(std::to_string(t));
  if (!task)
    throw UsageError("--task must be 1..4");
  return *task;
}

int radius_flag(const std::string &r) {
  if (r == "inf")
    return MechTemplate::kInfinite;
  try {
    const int v = std::stoi(r);
    if (v >= 0)
      return v;
  } catch (const std::exception &) {
  }
  throw UsageError("--radius must be a non-negative integer or 'inf'");
}

Json violations_json(const std::vector<Violation> &vs) {
  Json out = Json::array();
  for (const Violation &v: vs)
    out.push_back({ { "map", v.map }, { "kind", to_string(v.kind) }, { "message", v.message } });
  return out;
}

// --- subcommands ---------------------------------------------------------

struct ParseArgs {
  std::string text;
  bool json = false;
};

int run_parse(const ParseArgs &a) {
  try {
    if (a.text.find('|') != std::string::npos) {
      const MechStep step = parse_mechsmiles(a.text);
      const Json j { { "kind", "mechsmiles" },
                     { "host", write_smiles(step.host, MapMode::kAll) },
                     { "canonical", canonical_form(step.host) },
                     { "arrows", format_arrows(step.arrows) },
                     { "minimal", serialize(step, Scope::kMinimal) },
                     { "is_minimal", step.is_minimal() } };
      if (a.json)
        print_json(j);
      else
        std::cout << "host\t" << j["host"].get<std::string>() << "\narrows\t"
                  << j["arrows"].get<std::string>() << "\nminimal\t"
                  << j["minimal"].get<std::string>() << '\n';
      return kOk;
    }
    const MolGraph g = parse_smiles(a.text);
    const StabilityReport report = validate(g);
    const Json j { { "kind", "smiles" },
                   { "canonical", canonical_form(g) },
                   { "mapped", write_smiles(g, MapMode::kAll) },
                   { "stable", report.violations.empty() },
                   { "violations", violations_json(report.violations) } };
    if (a.json) {
      print_json(j);
    } else {
      std::cout << j["canonical"].get<std::string>() << '\n';
      for (const Violation &v: report.violations)
        std::cout << "violation\t" << to_string(v.kind) << '\t' << v.message << '\n';
    }
    return kOk;
  } catch (const ParseError &e) {
    diagnose(a.text, e);
    return kUsage;
  }
}

struct ApplyArgs {
  std::string mechsmiles;
  std::string state;
  std::string arrows;
  bool json = false;
};

int run_apply(const ApplyArgs &a) {
  const bool by_state = !a.state.empty();
  if (by_state == !a.mechsmiles.empty())
    throw UsageError("give either a MechSMILES or --state with --arrows");
  State pre;
  std::vector<Arrow> arrows;
  MechStep step;
  const std::string *current = by_state ? &a.state : &a.mechsmiles;
  try {
    if (by_state) {
      pre = State::parse(a.state);
      current = &a.arrows;
      arrows = parse_arrows(a.arrows);
    } else {
      step = parse_mechsmiles(a.mechsmiles);
      pre = State::from_graph(step.host);
    }
  } catch (const ParseError &e) {
    diagnose(*current, e);
    return kUsage;
  }
  try {
    const State product = by_state ? apply_move(pre, arrows) : apply_step(pre, step);
    const std::string minimal =
        serialize(by_state ? make_step(pre, arrows) : step, Scope::kMinimal);
    if (a.json)
      print_json({ { "product", product.canonical() },
                   { "mapped", product.smiles(MapMode::kAll) },
                   { "species", product.species() },
                   { "step", minimal } });
    else
      std::cout << product.canonical() << '\n';
    return kOk;
  } catch (const ApplyError &e) {
    if (a.json)
      print_json({ { "error", "apply-error" },
                   { "kind", to_string(e.kind()) },
                   { "message", e.what() },
                   { "violations", violations_json(e.violations()) } });
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kDomainFailure;
  }
}

struct EnumerateArgs {
  std::string smiles;
  int max_arrows = 2;
  int sample = 0;
  unsigned seed = 0;
  bool count = false;
  bool json = false;
};

int run_enumerate(const EnumerateArgs &a) {
  State s;
  try {
    s = State::parse(a.smiles);
  } catch (const ParseError &e) {
    diagnose(a.smiles, e);
    return kUsage;
  }
  std::vector<MoveSet> moves = enumerate_moves(s, { a.max_arrows });
  const std::size_t total = moves.size();
  if (a.sample > 0 && static_cast<std::size_t>(a.sample) < moves.size()) {
    std::mt19937 rng(a.seed);
    std::vector<MoveSet> picked;
    std::sample(moves.begin(), moves.end(), std::back_inserter(picked), a.sample, rng);
    moves = std::move(picked);
  }
  if (a.json) {
    Json j { { "state", s.smiles(MapMode::kAll) }, { "count", total } };
    if (!a.count) {
      Json list = Json::array();
      for (const MoveSet &m: moves)
        list.push_back({ { "arrows", format_arrows(m.arrows) },
                         { "product", apply_move(s, m.arrows).canonical() } });
      j["moves"] = list;
    }
    print_json(j);
    return kOk;
  }
  if (a.count) {
    std::cout << total << '\n';
    return kOk;
  }
  std::cout << "# " << s.smiles(MapMode::kAll) << '\n';
  for (const MoveSet &m: moves)
    std::cout << format_arrows(m.arrows) << '\t' << apply_move(s, m.arrows).canonical() << '\n';
  return kOk;
}

struct ConvertArgs {
  std::string format = "mech-uspto";
  std::string input = "-";
  std::string output;
  std::string rejects;
  int jobs = 1;
  std::size_t chunk = 512;
  bool json = false;
};

int run_convert(const ConvertArgs &a) {
  const auto fmt = parse_source_format(a.format);
  if (!fmt)
    throw UsageError("unknown --format '" + a.format + "'");
  Input in(a.input);
  Output out(a.output);
  std::ofstream rej;
  if (!a.rejects.empty()) {
    rej.open(a.rejects);
    if (!rej)
      throw UsageError("cannot write " + a.rejects);
  }
  ConvertOptions opts;
  opts.format = *fmt;
  opts.jobs = std::max(1, a.jobs);
  opts.chunk = std::max<std::size_t>(1, a.chunk);
  const ConvertSummary sum =
      convert_stream(in.stream(), out.stream(), a.rejects.empty() ? nullptr : &rej, opts);
  out.stream().flush();
  // The summary never mixes into JSONL on stdout.
  std::ostream &report = out.is_stdout() ? std::cerr : std::cout;
  if (a.json)
    report << Json { { "records", sum.records },
                     { "reactions", sum.mechanisms },
                     { "steps", sum.steps },
                     { "rejected_records", sum.rejected_records },
                     { "rejected_reactions", sum.rejected_mechanisms } }
                  .dump()
           << '\n';
  else
    report << "converted " << sum.mechanisms << " reactions, " << sum.steps << " steps from "
           << sum.records << " records (" << sum.rejected_records << " records and "
           << sum.rejected_mechanisms << " reactions rejected)\n";
  return kOk;
}

struct StatsArgs {
  std::string input = "-";
  bool json = false;
};

int run_stats(const StatsArgs &a) {
  std::vector<std::size_t> minimal, equilibrated;
  std::size_t reactions = 0;
  // Accumulates lengths only, so memory stays linear in steps, not states.
  for_each_mechanism(a.input, "", [&](const Mechanism &m) {
    ++reactions;
    for (const MechStep &s: m.steps) {
      minimal.push_back(serialize(s, Scope::kMinimal).size());
      equilibrated.push_back(serialize(s, Scope::kEquilibrated).size());
    }
  });
  const LengthStats mn = length_stats(minimal), eq = length_stats(equilibrated);
  if (a.json) {
    auto js = [](const LengthStats &s) {
      return Json { { "count", s.count }, { "mean", s.mean }, { "stddev", s.stddev } };
    };
    print_json({ { "reactions", reactions },
                 { "steps", minimal.size() },
                 { "minimal", js(mn) },
                 { "equilibrated", js(eq) } });
    return kOk;
  }
  std::cout << std::fixed << std::setprecision(2) << "scope\tcount\tmean\tstddev\n"
            << "minimal\t" << mn.count << '\t' << mn.mean << '\t' << mn.stddev << '\n'
            << "equilibrated\t" << eq.count << '\t' << eq.mean << '\t' << eq.stddev << '\n';
  return kOk;
}

struct TasksArgs {
  std::string input = "-";
  std::string output;
  int task = 4;
  bool no_retro = false;
  bool no_forward = false;
  bool no_product = false;
  bool shuffle = false;
  unsigned seed = 0;
  bool json = false;
};

int run_tasks(const TasksArgs &a) {
  const Task task = task_flag(a.task);
  TaskOptions opts;
  opts.retro = !a.no_retro;
  opts.forward = !a.no_forward;
  opts.no_product = !a.no_product;
  Output out(a.output);
  std::vector<TaskSample> held;
  auto emit = [&](const TaskSample &s) {
    if (a.json)
      out.stream() << to_json(s).dump() << '\n';
    else
      out.stream() << s.input << '\t' << s.target << '\n';
  };
  for_each_mechanism(a.input, "", [&](const Mechanism &m) {
    for (TaskSample &s: build_samples(m, task, opts)) {
      if (a.shuffle)
        held.push_back(std::move(s));
      else
        emit(s);
    }
  });
  if (a.shuffle) {
    std::mt19937 rng(a.seed);
    std::shuffle(held.begin(), held.end(), rng);
    for (const TaskSample &s: held)
      emit(s);
  }
  return kOk;
}

struct SearchArgs {
  std::string reactants;
  std::string goal;
  std::string policy;
  SearchConfig cfg;
  int task = 4;
  bool json = false;
};

Json mechanism_steps(const Mechanism &m) {
  Json steps = Json::array();
  for (const MechStep &s: m.steps)
    steps.push_back(serialize(s));
  return steps;
}

int run_search(const SearchArgs &a) {
  SearchConfig cfg = a.cfg;
  cfg.task = task_flag(a.task);
  State s;
  try {
    s = State::parse(a.reactants);
  } catch (const ParseError &e) {
    diagnose(a.reactants, e);
    return kUsage;
  }
  auto policy = make_policy(a.policy);
  const SearchResult r = best_first_search(s, a.goal, *policy, cfg);
  if (a.json) {
    Json j { { "solved", r.solved },
             { "score", r.score },
             { "reason", r.reason },
             { "expansions", r.stats.expansions },
             { "invalid_proposals", r.stats.invalid_proposals } };
    if (r.mechanism)
      j["steps"] = mechanism_steps(*r.mechanism);
    print_json(j);
  } else if (r.solved) {
    for (const MechStep &st: r.mechanism->steps)
      std::cout << serialize(st) << '\n';
    std::cerr << "solved in " << r.stats.expansions << " expansions, score " << r.score << '\n';
  } else {
    std::cerr << "not found: " << r.reason << " (" << r.stats.expansions << " expansions)\n";
  }
  return r.solved ? kOk : kDomainFailure;
}

struct ValidateArgs {
  std::string reactants;
  std::string product;
  std::string policy;
  SearchConfig cfg;
  bool json = false;
};

int run_validate(const ValidateArgs &a) {
  State s;
  try {
    s = State::parse(a.reactants);
  } catch (const ParseError &e) {
    diagnose(a.reactants, e);
    return kUsage;
  }
  auto policy = make_policy(a.policy);
  const Validation v = validate_reaction(s, a.product, *policy, a.cfg);
  if (a.json) {
    Json j { { "validated", v.validated },
             { "report", v.report },
             { "expansions", v.expansions } };
    if (v.mechanism)
      j["steps"] = mechanism_steps(*v.mechanism);
    print_json(j);
  } else {
    std::cout << (v.validated ? "validated" : "not-found") << '\t' << v.report << '\n';
    if (v.mechanism)
      for (const MechStep &st: v.mechanism->steps)
        std::cout << serialize(st) << '\n';
  }
  return v.validated ? kOk : kDomainFailure;
}

struct CorpusArgs {
  std::string input = "-";
  std::string id;
  std::string radius = "inf";
  bool json = false;
};

int run_map(const CorpusArgs &a) {
  int failures = 0;
  for_each_mechanism(a.input, a.id, [&](const Mechanism &m) {
    try {
      const AtomMap map = derive_atom_map(m);
      if (a.json) {
        Json pairs = Json::array();
        for (const auto &[x, y]: map.pairs)
          pairs.push_back({ x, y });
        print_json({ { "reaction_id", m.reaction_id },
                     { "mapped_reaction", map.mapped_reaction },
                     { "pairs", pairs } });
      } else {
        std::cout << m.reaction_id << '\t' << map.mapped_reaction << '\n';
      }
    } catch (const Error &e) {
      ++failures;
      std::cerr << "error: " << m.reaction_id << ": " << e.what() << '\n';
    }
  });
  return failures == 0 ? kOk : kDomainFailure;
}

int run_template(const CorpusArgs &a) {
  const int radius = radius_flag(a.radius);
  for_each_mechanism(a.input, a.id, [&](const Mechanism &m) {
    const MechTemplate t = extract_template(m, radius);
    if (a.json) {
      Json j = t.to_json();
      j["reaction_id"] = m.reaction_id;
      print_json(j);
    } else {
      std::cout << m.reaction_id << '\t' << t.to_string() << '\n';
    }
  });
  return kOk;
}

struct EvaluateArgs {
  std::string input = "-";
  std::string policy;
  std::vector<int> ks { 1, 3, 5, 10 };
  std::vector<int> beams { 1, 3 };
  int task = 4;
  int jobs = 1;
  bool json = false;
};

int run_evaluate(const EvaluateArgs &a) {
  std::vector<Mechanism> mechs;
  for_each_mechanism(a.input, "", [&](Mechanism m) { mechs.push_back(std::move(m)); });
  std::string spec = a.policy;
  // "replay" alone replays the evaluated file itself.
  std::unique_ptr<Policy> policy;
  if (spec == "replay")
    policy = std::make_unique<ReplayPolicy>(mechs);
  else
    policy = make_policy(spec);
  EvalConfig cfg;
  cfg.ks = a.ks;
  cfg.beam_widths = a.beams;
  cfg.task = task_flag(a.task);
  cfg.jobs = std::max(1, a.jobs);
  const Metrics m = evaluate(mechs, *policy, cfg);
  if (a.json)
    print_json(m.to_json());
  else
    std::cout << m.table();
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string sessions = "sessions";
  std::string policy;
  bool json = false;
};

httplib::Server *g_server = nullptr;

int run_serve(const ServeArgs &a) {
  ServiceConfig cfg;
  cfg.session_dir = a.sessions;
  cfg.policy = a.policy;
  Service service(cfg);
  httplib::Server server;
  service.mount(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  int port = a.port;
  if (port == 0)
    port = server.bind_to_any_port(a.host);
  else if (!server.bind_to_port(a.host, port))
    port = -1;
  if (port < 0) {
    std::cerr << "error: cannot bind " << a.host << ':' << a.port << '\n';
    return kDomainFailure;
  }
  if (a.json)
    print_json({ { "host", a.host }, { "port", port } });
  else
    std::cout << "listening on http://" << a.host << ':' << port << '\n';
  std::cout.flush();
  server.listen_after_bind();
  return kOk;
}

void add_search_flags(CLI::App *c, SearchConfig &cfg, std::string &policy) {
  c->add_option("--policy", policy,
                "heuristic[:L], replay:<file>, http://host:port/path or cmd:<command>");
  c->add_option("--budget", cfg.budget, "node expansions")->capture_default_str();
  c->add_option("--top-k", cfg.top_k, "proposals requested per expansion")
      ->capture_default_str();
  c->add_option("--max-children", cfg.max_children, "children kept per expansion")
      ->capture_default_str();
  c->add_option("--max-depth", cfg.max_depth)->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app { "MechSMILES toolkit: parse, apply, convert, search and serve "
                 "arrow-pushing mechanisms" };
  app.require_subcommand(1);

  ParseArgs parse_a;
  auto *parse = app.add_subcommand("parse", "parse SMILES or MechSMILES");
  parse->add_option("text", parse_a.text)->required();
  parse->add_flag("--json", parse_a.json);

  ApplyArgs apply_a;
  auto *apply = app.add_subcommand("apply", "apply one elementary step");
  apply->add_option("mechsmiles", apply_a.mechsmiles);
  apply->add_option("--state", apply_a.state, "SMILES of the state");
  apply->add_option("--arrows", apply_a.arrows, "arrows in the state's map numbers");
  apply->add_flag("--json", apply_a.json);

  EnumerateArgs enum_a;
  auto *enumerate = app.add_subcommand("enumerate", "list legal arrow sets");
  enumerate->add_option("smiles", enum_a.smiles)->required();
  enumerate->add_option("--max-arrows", enum_a.max_arrows)
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  enumerate->add_option("--sample", enum_a.sample, "print a random subset of this size");
  enumerate->add_option("--seed", enum_a.seed)->capture_default_str();
  enumerate->add_flag("--count", enum_a.count, "print only the number of moves");
  enumerate->add_flag("--json", enum_a.json);

  ConvertArgs conv_a;
  auto *convert = app.add_subcommand("convert", "convert a source dataset to unified JSONL");
  convert->add_option("--format", conv_a.format, "flower, mech-uspto, pmechdb or mechsmiles")
      ->capture_default_str();
  convert->add_option("-i,--input", conv_a.input)->capture_default_str();
  convert->add_option("-o,--output", conv_a.output);
  convert->add_option("--rejects", conv_a.rejects, "JSONL of rejected records");
  convert->add_option("--jobs", conv_a.jobs)->check(CLI::PositiveNumber)->capture_default_str();
  convert->add_option("--chunk", conv_a.chunk, "records per parallel batch")
      ->capture_default_str();
  convert->add_flag("--json", conv_a.json);

  StatsArgs stats_a;
  auto *stats = app.add_subcommand("stats", "MechSMILES length statistics of a corpus");
  stats->add_option("input", stats_a.input)->capture_default_str();
  stats->add_flag("--json", stats_a.json);

  TasksArgs tasks_a;
  auto *tasks = app.add_subcommand("tasks", "build training samples");
  tasks->add_option("input", tasks_a.input)->capture_default_str();
  tasks->add_option("-o,--output", tasks_a.output);
  tasks->add_option("--task", tasks_a.task)->check(CLI::Range(1, 4))->capture_default_str();
  tasks->add_flag("--no-retro", tasks_a.no_retro);
  tasks->add_flag("--no-forward", tasks_a.no_forward);
  tasks->add_flag("--no-product-variant", tasks_a.no_product);
  tasks->add_flag("--shuffle", tasks_a.shuffle);
  tasks->add_option("--seed", tasks_a.seed)->capture_default_str();
  tasks->add_flag("--json", tasks_a.json, "JSONL records instead of input<TAB>target");

  SearchArgs search_a;
  auto *search = app.add_subcommand("search", "best-first search from reactants to a goal");
  search->add_option("--reactants", search_a.reactants)->required();
  search->add_option("--goal", search_a.goal, "dot-separated species to reach")->required();
  search->add_option("--task", search_a.task)->check(CLI::Range(1, 4))->capture_default_str();
  add_search_flags(search, search_a.cfg, search_a.policy);
  search->add_flag("--json", search_a.json);

  ValidateArgs val_a;
  auto *validate_c = app.add_subcommand("validate", "check that a reaction has a mechanism");
  validate_c->add_option("--reactants", val_a.reactants)->required();
  validate_c->add_option("--product", val_a.product)->required();
  add_search_flags(validate_c, val_a.cfg, val_a.policy);
  validate_c->add_flag("--json", val_a.json);

  CorpusArgs map_a;
  auto *map = app.add_subcommand("map", "atom maps of mechanisms");
  map->add_option("input", map_a.input)->capture_default_str();
  map->add_option("--id", map_a.id, "only this reaction id");
  map->add_flag("--json", map_a.json);

  CorpusArgs tmpl_a;
  auto *tmpl = app.add_subcommand("template", "mechanistic templates");
  tmpl->add_option("input", tmpl_a.input)->capture_default_str();
  tmpl->add_option("--id", tmpl_a.id, "only this reaction id");
  tmpl->add_option("--radius", tmpl_a.radius, "bonds around reacting atoms, or 'inf'")
      ->capture_default_str();
  tmpl->add_flag("--json", tmpl_a.json);

  EvaluateArgs eval_a;
  auto *eval = app.add_subcommand("evaluate", "step and pathway accuracy of a policy");
  eval->add_option("input", eval_a.input)->capture_default_str();
  eval->add_option("--policy", eval_a.policy,
                   "as for search; 'replay' replays the input itself");
  eval->add_option("--k", eval_a.ks, "top-k cutoffs")->delimiter(',')->capture_default_str();
  eval->add_option("--beam", eval_a.beams, "beam widths")->delimiter(',')->capture_default_str();
  eval->add_option("--task", eval_a.task)->check(CLI::Range(1, 4))->capture_default_str();
  eval->add_option("--jobs", eval_a.jobs)->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_flag("--json", eval_a.json);

  ServeArgs serve_a;
  auto *serve = app.add_subcommand("serve", "run the annotation HTTP service");
  serve->add_option("--host", serve_a.host)->capture_default_str();
  serve->add_option("--port", serve_a.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--sessions", serve_a.sessions, "session directory")
      ->capture_default_str();
  serve->add_option("--policy", serve_a.policy, "policy for /search");
  serve->add_flag("--json", serve_a.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*parse)
      return run_parse(parse_a);
    if (*apply)
      return run_apply(apply_a);
    if (*enumerate)
      return run_enumerate(enum_a);
    if (*convert)
      return run_convert(conv_a);
    if (*stats)
      return run_stats(stats_a);
    if (*tasks)
      return run_tasks(tasks_a);
    if (*search)
      return run_search(search_a);
    if (*validate_c)
      return run_validate(val_a);
    if (*map)
      return run_map(map_a);
    if (*tmpl)
      return run_template(tmpl_a);
    if (*eval)
      return run_evaluate(eval_a);
    if (*serve)
      return run_serve(serve_a);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "error: malformed JSONL input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kUsage;
}
