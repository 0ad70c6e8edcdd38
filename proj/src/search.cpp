//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/search.h"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

namespace mech {

using nlohmann::json;

std::vector<std::string> goal_species(std::string_view goal_smiles) {
  if (goal_smiles.empty())
    return {};
  return State::parse(goal_smiles, false).species();
}

namespace {

bool contains_species(std::vector<std::string> have,
                      const std::vector<std::string> &want) {
  // Both sides sorted.
  std::sort(have.begin(), have.end());
  return std::includes(have.begin(), have.end(), want.begin(), want.end());
}

} // namespace

bool goal_reached(const State &s, const std::vector<std::string> &goal) {
  if (goal.empty())
    return false;
  return contains_species(s.species(), goal);
}

// ---------------------------------------------------------------- replay

ReplayPolicy::ReplayPolicy(std::span<const Mechanism> mechs) {
  for (const Mechanism &m: mechs)
    add(m);
}

void ReplayPolicy::add(const Mechanism &m) {
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    by_state_[m.before(k).canonical()].push_back(m.steps[k]);
    std::vector<std::string> species;
    for (const auto &comp: components(m.steps[k].host))
      species.push_back(canonical_form(subgraph(m.steps[k].host, comp)));
    std::sort(species.begin(), species.end());
    by_host_.emplace_back(std::move(species), m.steps[k]);
  }
}

std::vector<Proposal> ReplayPolicy::propose(const State &s, const std::string &,
                                            Task, int top_k) {
  std::vector<Proposal> out;
  std::set<std::string> seen;
  auto push = [&](const MechStep &step, double score) {
    if (static_cast<int>(out.size()) >= top_k)
      return;
    const std::string key = serialize(step, Scope::kMinimal);
    if (seen.insert(key).second)
      out.push_back({ step, score });
  };
  if (auto it = by_state_.find(s.canonical()); it != by_state_.end())
    for (const MechStep &step: it->second)
      push(step, 0.0);
  const std::vector<std::string> have = s.species();
  for (const auto &[species, step]: by_host_)
    if (contains_species(have, species))
      push(step, -1.0);
  return out;
}

// ------------------------------------------------------------- heuristic

namespace {

// Multiset of Weisfeiler-Lehman labels (radius 0..2) over the heavy atoms
// of one component; hydrogens only enter through their counts.
using Features = std::vector<std::uint64_t>;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Features features(const MolGraph &g, std::span<const int> atoms) {
  std::vector<int> heavy;
  for (int i: atoms)
    if (!g.atom(i).is_hydrogen())
      heavy.push_back(i);
  if (heavy.empty())
    heavy.assign(atoms.begin(), atoms.end());
  std::map<int, std::uint64_t> label;
  for (int i: heavy) {
    int h = 0;
    for (const Neighbor &n: g.neighbors(i))
      h += g.atom(n.atom).is_hydrogen() ? 1 : 0;
    const Atom &a = g.atom(i);
    label[i] = mix(mix(mix(1, a.element), a.charge + 16), h);
  }
  Features out;
  for (int i: heavy)
    out.push_back(label[i]);
  for (int r = 1; r <= 2; ++r) {
    std::map<int, std::uint64_t> next;
    for (int i: heavy) {
      std::vector<std::uint64_t> nb;
      for (const Neighbor &n: g.neighbors(i))
        if (label.count(n.atom) > 0)
          nb.push_back(mix(label[n.atom], g.bond(n.bond).order));
      std::sort(nb.begin(), nb.end());
      std::uint64_t h = mix(label[i], r);
      for (std::uint64_t v: nb)
        h = mix(h, v);
      next[i] = h;
      out.push_back(h);
    }
    label = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t feature_distance(const Features &x, const Features &y) {
  std::size_t common = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return x.size() + y.size() - 2 * common;
}

// Distance of a set of components to the goal: every goal species is
// matched against its closest component.
std::size_t goal_distance(const std::vector<Features> &goal,
                          const std::vector<Features> &comps) {
  std::size_t total = 0;
  for (const Features &gf: goal) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const Features &cf: comps)
      best = std::min(best, feature_distance(gf, cf));
    total += best == std::numeric_limits<std::size_t>::max() ? gf.size() : best;
  }
  return total;
}

std::vector<Features> component_features(const MolGraph &g) {
  std::vector<Features> out;
  for (const auto &comp: components(g))
    out.push_back(features(g, comp));
  return out;
}

// Atoms reachable from `seeds`, grouped per component.
std::vector<std::vector<int>> components_of(const MolGraph &g,
                                            const std::set<int> &seeds) {
  std::vector<char> seen(g.num_atoms(), 0);
  std::vector<std::vector<int>> out;
  for (int s: seeds) {
    if (seen[s])
      continue;
    std::vector<int> comp { s };
    seen[s] = 1;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (const Neighbor &n: g.neighbors(comp[k]))
        if (!seen[n.atom]) {
          seen[n.atom] = 1;
          comp.push_back(n.atom);
        }
    out.push_back(std::move(comp));
  }
  return out;
}

double electronegativity(int z) {
  return element(z).electronegativity;
}

struct Scored {
  std::vector<Arrow> arrows;
  std::tuple<int, std::size_t, int, int> key;
};

// Rough chemical implausibility: carbon-carbon sigma cleavage, peroxide
// formation, main-group atoms left with |charge| > 1, and new bonds aimed
// at anions or at electronegative lone-pair atoms.
int implausibility(const MolGraph &pre, const MolGraph &post,
                   std::span<const Arrow> arrows, const std::set<int> &touched) {
  const ValenceTable &table = ValenceTable::defaults();
  int bad = 0;
  for (const Arrow &x: arrows) {
    if (x.kind == ArrowKind::kIonize)
      continue;
    const int t = pre.find_map(x.sink());
    const Atom &a = pre.atom(t);
    if (table.exempt(a.element))
      continue;
    if (a.charge < 0)
      ++bad;
    else if (a.charge == 0 && nonbonding_electrons(pre, t) >= 2
             && element(a.element).electronegativity >= 3.0)
      ++bad;
  }
  for (int i: touched) {
    const Atom &a = post.atom(i);
    if (std::abs(a.charge) > 1 && !table.exempt(a.element))
      ++bad;
    for (const Neighbor &n: pre.neighbors(i)) {
      if (n.atom < i || touched.count(n.atom) == 0)
        continue;
      if (a.element == kCarbon && pre.atom(n.atom).element == kCarbon
          && post.bond_order(i, n.atom) == 0)
        ++bad;
    }
    for (const Neighbor &n: post.neighbors(i)) {
      if (n.atom < i || pre.bond_order(i, n.atom) != 0)
        continue;
      if (a.element == kOxygen && post.atom(n.atom).element == kOxygen)
        ++bad;
    }
  }
  return bad;
}

} // namespace

std::vector<Proposal> HeuristicPolicy::propose(const State &s,
                                               const std::string &goal, Task,
                                               int top_k) {
  const MolGraph &g = s.graph();
  EnumerateOptions eo;
  eo.max_arrows = max_arrows_;
  const std::vector<MoveSet> moves = enumerate_moves(s, eo);
  if (moves.empty() || top_k <= 0)
    return {};

  std::vector<Features> target;
  if (!goal.empty())
    target = component_features(State::parse(goal, false).graph());
  const auto comps = components(g);
  std::vector<int> comp_of(g.num_atoms());
  std::vector<Features> have;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (int i: comps[c])
      comp_of[i] = static_cast<int>(c);
    have.push_back(features(g, comps[c]));
  }

  std::vector<Scored> scored;
  scored.reserve(moves.size());
  for (const MoveSet &mv: moves) {
    const MolGraph post = apply_arrows(g, mv.arrows);
    std::set<int> touched;
    for (const Arrow &a: mv.arrows)
      for (int m: { a.a, a.b, a.c })
        if (m != 0)
          touched.insert(g.find_map(m));
    // Atom indices agree between g and post.
    std::set<int> old_comps;
    for (int i: touched)
      old_comps.insert(comp_of[i]);
    std::vector<Features> after;
    for (std::size_t c = 0; c < have.size(); ++c)
      if (old_comps.count(static_cast<int>(c)) == 0)
        after.push_back(have[c]);
    for (const auto &comp: components_of(post, touched))
      after.push_back(features(post, comp));
    const std::size_t distance = goal_distance(target, after);

    int charge_change = 0;
    for (int i: touched)
      charge_change += std::abs(post.atom(i).charge) - std::abs(g.atom(i).charge);
    const Arrow &first = mv.arrows.front();
    const int src = g.find_map(first.a);
    const int dst = g.find_map(first.sink());
    const double gap = std::abs(electronegativity(g.atom(src).element)
                                - electronegativity(g.atom(dst).element));
    const int gap_bin = static_cast<int>(std::floor(gap / 0.25));
    scored.push_back({ mv.arrows, { implausibility(g, post, mv.arrows, touched), distance,
                                    charge_change, -gap_bin } });
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored &x, const Scored &y) { return x.key < y.key; });

  std::vector<double> score(scored.size());
  int tier = 0;
  for (std::size_t k = 0; k < scored.size(); ++k) {
    if (k > 0 && scored[k - 1].key < scored[k].key)
      ++tier;
    score[k] = -tier_gap_ * tier;
  }
  const double top = score.front();
  double z = 0;
  for (double v: score)
    z += std::exp(v - top);
  const double log_z = top + std::log(z);

  std::vector<Proposal> out;
  std::set<std::string> seen;
  for (std::size_t k = 0;
       k < scored.size() && static_cast<int>(out.size()) < top_k; ++k) {
    State next;
    try {
      next = apply_move(s, scored[k].arrows);
    } catch (const ApplyError &) {
      continue;
    }
    if (!seen.insert(next.canonical()).second)
      continue;
    out.push_back({ make_step(s, scored[k].arrows), score[k] - log_z });
  }
  return out;
}

// -------------------------------------------------------------- external

namespace {

struct Url {
  std::string host;
  int port = 80;
  std::string path = "/";
};

Url parse_url(const std::string &url) {
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0)
    rest = rest.substr(scheme.size());
  else if (rest.find("://") != std::string::npos)
    throw Error("unsupported URL scheme: " + url);
  Url u;
  const auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos)
    u.path = rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    u.port = std::stoi(authority.substr(colon + 1));
    authority.resize(colon);
  }
  u.host = authority;
  if (u.host.empty())
    throw Error("missing host in URL: " + url);
  return u;
}

void write_all(int fd, const std::string &data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR)
        continue;
      throw Error(std::string("policy process write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

} // namespace

std::unique_ptr<ExternalPolicy> ExternalPolicy::spawn(const std::string &command) {
  int in[2], out[2];
  if (::pipe(in) != 0)
    throw Error("pipe failed");
  if (::pipe(out) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw Error("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0)
    throw Error("fork failed");
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::close(in[0]);
    ::close(in[1]);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  std::unique_ptr<ExternalPolicy> p(new ExternalPolicy());
  p->pid_ = pid;
  p->to_child_ = in[1];
  p->from_child_ = out[0];
  // A dead child must surface as a write error, not kill the process.
  std::signal(SIGPIPE, SIG_IGN);
  return p;
}

std::unique_ptr<ExternalPolicy> ExternalPolicy::http(const std::string &url) {
  const Url u = parse_url(url);
  std::unique_ptr<ExternalPolicy> p(new ExternalPolicy());
  p->host_ = u.host;
  p->port_ = u.port;
  p->path_ = u.path;
  return p;
}

ExternalPolicy::~ExternalPolicy() {
  if (to_child_ >= 0)
    ::close(to_child_);
  if (from_child_ >= 0)
    ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    for (int k = 0; k < 50; ++k) {
      if (::waitpid(pid_, &status, WNOHANG) != 0)
        return;
      ::usleep(10000);
    }
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, &status, 0);
  }
}

json ExternalPolicy::request(const State &s, const std::string &goal, Task task,
                             int top_k) {
  return { { "state_mechsmiles_host", s.smiles(MapMode::kAll) },
           { "state", s.canonical() },
           { "goal", goal },
           { "task", to_string(task) },
           { "top_k", top_k } };
}

std::vector<Proposal> ExternalPolicy::parse_response(const json &j) {
  std::vector<Proposal> out;
  if (!j.is_object() || !j.contains("proposals") || !j["proposals"].is_array())
    throw Error("policy response lacks a proposals array");
  for (const json &p: j["proposals"]) {
    if (!p.is_object() || !p.contains("mechsmiles") || !p["mechsmiles"].is_string())
      continue;
    double lp = 0;
    if (p.contains("logprob")) {
      if (!p["logprob"].is_number())
        continue;
      lp = p["logprob"].get<double>();
    }
    if (!std::isfinite(lp))
      continue;
    try {
      out.push_back({ parse_mechsmiles(p["mechsmiles"].get<std::string>()), lp });
    } catch (const Error &) {
      continue;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Proposal &x, const Proposal &y) {
    return x.logprob > y.logprob;
  });
  return out;
}

json ExternalPolicy::exchange(const json &req) {
  std::lock_guard lock(mu_);
  if (!host_.empty()) {
    httplib::Client cli(host_, port_);
    cli.set_read_timeout(60, 0);
    auto res = cli.Post(path_, req.dump(), "application/json");
    if (!res)
      throw Error("policy endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error("policy endpoint returned HTTP " + std::to_string(res->status));
    return json::parse(res->body);
  }
  write_all(to_child_, req.dump() + "\n");
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      return json::parse(line);
    }
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR)
      continue;
    if (n <= 0)
      throw Error("policy process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<Proposal> ExternalPolicy::propose(const State &s, const std::string &goal,
                                              Task task, int top_k) {
  json res;
  try {
    res = exchange(request(s, goal, task, top_k));
  } catch (const json::exception &e) {
    throw Error(std::string("malformed policy response: ") + e.what());
  }
  auto out = parse_response(res);
  if (static_cast<int>(out.size()) > top_k)
    out.resize(top_k);
  return out;
}

// ----------------------------------------------------------------- search

namespace {

struct Node {
  State state;
  int parent = -1;
  MechStep step;
  double score = 0;
  int depth = 0;
};

bool on_path(const std::vector<Node> &nodes, int at, const State &s) {
  for (int i = at; i >= 0; i = nodes[i].parent)
    if (nodes[i].state == s)
      return true;
  return false;
}

Mechanism path_mechanism(const std::vector<Node> &nodes, int leaf) {
  std::vector<int> chain;
  for (int i = leaf; i > 0; i = nodes[i].parent)
    chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  Mechanism m;
  m.source_format = "search";
  m.initial = nodes[0].state;
  for (int i: chain) {
    m.steps.push_back(nodes[i].step);
    m.intermediates.push_back(nodes[i].state);
  }
  return m;
}

bool formula_allows(const State &initial, const std::string &goal) {
  if (goal.empty())
    return false;
  const Formula want = formula_multiset(State::parse(goal, false).graph());
  return want.contained_in(formula_multiset(initial.graph()));
}

// Applies a proposal and re-expresses it in the state's own numbering.
std::optional<std::pair<State, MechStep>> expand(const State &s, const Proposal &p) {
  try {
    std::vector<Arrow> arrows = resolve_step(s, p.step);
    State next = apply_move(s, arrows);
    return std::pair { std::move(next), make_step(s, std::move(arrows)) };
  } catch (const Error &) {
    return std::nullopt;
  }
}

} // namespace

SearchResult best_first_search(const State &initial, const std::string &goal,
                               Policy &policy, const SearchConfig &cfg) {
  SearchResult result;
  if (!formula_allows(initial, goal)) {
    result.reason = "goal atoms are not contained in the reactants";
    return result;
  }
  const std::vector<std::string> want = goal_species(goal);

  std::vector<Node> nodes;
  nodes.push_back({ initial, -1, {}, 0.0, 0 });
  // Max-heap on score; deeper, then earlier nodes win ties.
  using Entry = std::tuple<double, int, int>;
  auto cmp = [](const Entry &x, const Entry &y) {
    const auto &[xs, xd, xi] = x;
    const auto &[ys, yd, yi] = y;
    if (xs != ys)
      return xs < ys;
    if (xd != yd)
      return xd < yd;
    return xi > yi;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
  frontier.push({ 0.0, 0, 0 });
  int deepest = 0;

  while (!frontier.empty()) {
    const int at = std::get<2>(frontier.top());
    frontier.pop();
    if (goal_reached(nodes[at].state, want)) {
      result.solved = true;
      result.score = nodes[at].score;
      result.mechanism = path_mechanism(nodes, at);
      return result;
    }
    if (nodes[at].depth >= cfg.max_depth)
      continue;
    if (result.stats.expansions >= cfg.budget) {
      result.reason = "expansion budget exhausted";
      break;
    }
    ++result.stats.expansions;
    result.stats.expanded_scores.push_back(nodes[at].score);

    const auto proposals =
        policy.propose(nodes[at].state, goal, cfg.task, cfg.top_k);
    int kept = 0;
    std::set<std::string> siblings;
    for (const Proposal &p: proposals) {
      if (kept >= cfg.max_children)
        break;
      auto next = expand(nodes[at].state, p);
      if (!next) {
        ++result.stats.invalid_proposals;
        continue;
      }
      if (on_path(nodes, at, next->first)
          || !siblings.insert(next->first.canonical()).second)
        continue;
      nodes.push_back({ std::move(next->first), at, std::move(next->second),
                        nodes[at].score + p.logprob, nodes[at].depth + 1 });
      const int id = static_cast<int>(nodes.size()) - 1;
      if (nodes[id].depth > nodes[deepest].depth)
        deepest = id;
      frontier.push({ nodes[id].score, nodes[id].depth, id });
      ++kept;
    }
    result.stats.max_children = std::max(result.stats.max_children, kept);
  }
  if (result.reason.empty())
    result.reason = "search space exhausted";
  for (const MechStep &s: path_mechanism(nodes, deepest).steps)
    result.best_partial.push_back(s);
  return result;
}

std::vector<Pathway> beam_pathways(const State &initial, const std::string &goal,
                                   Policy &policy, int width, int max_depth,
                                   int top_k, Task task) {
  struct Hyp {
    Mechanism m;
    double score = 0;
  };
  const std::vector<std::string> want = goal_species(goal);
  std::vector<Pathway> done;
  if (width <= 0)
    return done;
  std::vector<Hyp> beam(1);
  beam[0].m.source_format = "search";
  beam[0].m.initial = initial;

  for (int depth = 0; depth < max_depth && !beam.empty(); ++depth) {
    std::vector<Hyp> cands;
    for (const Hyp &h: beam) {
      const State &cur = h.m.goal();
      for (const Proposal &p: policy.propose(cur, goal, task, top_k)) {
        auto next = expand(cur, p);
        if (!next)
          continue;
        bool cycle = next->first == h.m.initial;
        for (const State &s: h.m.intermediates)
          cycle = cycle || s == next->first;
        if (cycle)
          continue;
        Hyp c = h;
        c.m.steps.push_back(std::move(next->second));
        c.m.intermediates.push_back(std::move(next->first));
        c.score += p.logprob;
        cands.push_back(std::move(c));
      }
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Hyp &x, const Hyp &y) { return x.score > y.score; });
    if (static_cast<int>(cands.size()) > width)
      cands.resize(width);
    beam.clear();
    for (Hyp &c: cands) {
      if (goal_reached(c.m.goal(), want))
        done.push_back({ std::move(c.m), c.score });
      else
        beam.push_back(std::move(c));
    }
  }
  std::stable_sort(done.begin(), done.end(), [](const Pathway &x, const Pathway &y) {
    return x.score > y.score;
  });
  return done;
}

// ------------------------------------------------------------- evaluation

std::string task_goal(const Mechanism &m, Task task) {
  return task == Task::kEquilibrated ? full_products(m) : main_product(m);
}

bool Metrics::monotone() const {
  double last = -1;
  for (const auto &[k, v]: step_accuracy) {
    if (v + 1e-12 < last)
      return false;
    last = v;
  }
  last = -1;
  for (const auto &[w, v]: pathway_accuracy) {
    if (v + 1e-12 < last)
      return false;
    last = v;
  }
  return true;
}

json Metrics::to_json() const {
  json j { { "steps", steps }, { "reactions", reactions } };
  json sa = json::object(), pa = json::object();
  for (const auto &[k, v]: step_accuracy)
    sa["top" + std::to_string(k)] = v;
  for (const auto &[w, v]: pathway_accuracy)
    pa["beam" + std::to_string(w)] = v;
  j["step_accuracy"] = sa;
  j["pathway_accuracy"] = pa;
  return j;
}

std::string Metrics::table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "steps\t" << steps << "\nreactions\t" << reactions << '\n';
  for (const auto &[k, v]: step_accuracy)
    os << "top-" << k << " step accuracy\t" << v << '\n';
  for (const auto &[w, v]: pathway_accuracy)
    os << "pathway accuracy (beam " << w << ")\t" << v << '\n';
  return os.str();
}

namespace {

struct Tally {
  std::size_t steps = 0;
  std::size_t reactions = 0;
  std::map<int, std::size_t> step_hits, path_hits;
};

Tally score_mechanism(const Mechanism &m, Policy &policy, const EvalConfig &cfg) {
  Tally t;
  if (m.steps.empty())
    return t;
  const int max_k = cfg.ks.empty() ? 0 : *std::max_element(cfg.ks.begin(), cfg.ks.end());
  t.reactions = 1;
  const std::string goal = task_goal(m, cfg.task);
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    ++t.steps;
    const State &pre = m.before(k);
    const auto proposals = policy.propose(pre, goal, cfg.task, max_k);
    int first = -1;
    for (std::size_t r = 0; r < proposals.size() && static_cast<int>(r) < max_k; ++r) {
      auto next = expand(pre, proposals[r]);
      if (next && next->first == m.intermediates[k]) {
        first = static_cast<int>(r);
        break;
      }
    }
    for (int kk: cfg.ks)
      if (first >= 0 && first < kk)
        ++t.step_hits[kk];
  }
  for (int w: cfg.beam_widths) {
    const int depth = static_cast<int>(m.steps.size()) + cfg.extra_depth;
    for (const Pathway &p: beam_pathways(m.initial, goal, policy, w, depth,
                                         std::max(max_k, w), cfg.task)) {
      if (p.mechanism.intermediates == m.intermediates) {
        ++t.path_hits[w];
        break;
      }
    }
  }
  return t;
}

} // namespace

Metrics evaluate(std::span<const Mechanism> mechs, Policy &policy,
                 const EvalConfig &cfg) {
  std::vector<Tally> tallies(mechs.size());
  std::atomic<std::size_t> cursor { 0 };
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < mechs.size();) {
      try {
        tallies[i] = score_mechanism(mechs[i], policy, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(mechs.size())));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back(work);
    for (auto &t: pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);

  Metrics out;
  std::map<int, std::size_t> step_hits, path_hits;
  for (const Tally &t: tallies) {
    out.steps += t.steps;
    out.reactions += t.reactions;
    for (const auto &[k, v]: t.step_hits)
      step_hits[k] += v;
    for (const auto &[w, v]: t.path_hits)
      path_hits[w] += v;
  }
  for (int k: cfg.ks)
    out.step_accuracy[k] = out.steps == 0 ? 0.0
                                          : static_cast<double>(step_hits[k]) / out.steps;
  for (int w: cfg.beam_widths)
    out.pathway_accuracy[w] =
        out.reactions == 0 ? 0.0 : static_cast<double>(path_hits[w]) / out.reactions;
  return out;
}

std::unique_ptr<Policy> make_policy(const std::string &spec) {
  if (spec.empty() || spec == "heuristic")
    return std::make_unique<HeuristicPolicy>();
  if (spec.rfind("heuristic:", 0) == 0)
    return std::make_unique<HeuristicPolicy>(std::stoi(spec.substr(10)));
  if (spec.rfind("replay:", 0) == 0) {
    std::ifstream in(spec.substr(7));
    if (!in)
      throw Error("cannot read " + spec.substr(7));
    const std::vector<Mechanism> mechs = read_mechanisms(in);
    return std::make_unique<ReplayPolicy>(mechs);
  }
  if (spec.rfind("http://", 0) == 0)
    return ExternalPolicy::http(spec);
  if (spec.rfind("cmd:", 0) == 0)
    return ExternalPolicy::spawn(spec.substr(4));
  throw Error("unknown policy '" + spec + "'");
}

Validation validate_reaction(const State &reactants, const std::string &product,
                             Policy &policy, const SearchConfig &cfg) {
  Validation v;
  if (!formula_allows(reactants, product)) {
    v.report = "rejected: product atoms are not contained in the reactants";
    return v;
  }
  SearchResult r = best_first_search(reactants, product, policy, cfg);
  v.expansions = r.stats.expansions;
  if (r.solved) {
    v.validated = true;
    v.report = "validated: " + std::to_string(r.mechanism->steps.size())
               + " elementary steps after " + std::to_string(v.expansions)
               + " expansions";
    v.mechanism = std::move(r.mechanism);
  } else {
    v.report = "not validated (" + r.reason + ") after "
               + std::to_string(v.expansions)
               + " expansions; a failed search does not prove the reaction "
                 "impossible";
  }
  return v;
}

} // namespace mech
