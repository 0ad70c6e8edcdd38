//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <chrono>
#include <sstream>

#include "mech/search.h"
#include "test_util.h"

using namespace mech;

namespace {

Mechanism load(const std::string &name) {
  std::istringstream in(test::slurp(test::data_path(name)));
  return read_mechanisms(in).front();
}

class EmptyPolicy: public Policy {
public:
  std::vector<Proposal> propose(const State &, const std::string &, Task,
                                int) override {
    return {};
  }
};

// Puts the recorded step at a fixed rank among decoy moves.
class RankedPolicy: public Policy {
public:
  RankedPolicy(std::span<const Mechanism> mechs, std::map<std::string, int> ranks)
      : replay_(mechs), ranks_(std::move(ranks)) { }

  std::vector<Proposal> propose(const State &s, const std::string &goal, Task task,
                                int top_k) override {
    auto truth = replay_.propose(s, goal, task, 1);
    REQUIRE(truth.size() == 1);
    const State want = apply_step(s, truth[0].step);
    std::vector<Proposal> decoys;
    EnumerateOptions eo;
    eo.max_arrows = 2;
    for (const MoveSet &mv: enumerate_moves(s, eo)) {
      if (apply_move(s, mv.arrows) == want)
        continue;
      decoys.push_back({ make_step(s, mv.arrows), 0 });
    }
    const int rank = ranks_.at(s.canonical());
    std::vector<Proposal> out;
    for (int r = 0; r < top_k && !decoys.empty(); ++r) {
      if (r == rank) {
        out.push_back(truth[0]);
      } else {
        out.push_back(decoys.back());
        decoys.pop_back();
      }
      out.back().logprob = -r;
    }
    return out;
  }

private:
  ReplayPolicy replay_;
  std::map<std::string, int> ranks_;
};

// Prefers a dead-end decoy at the first state.
class NoisyPolicy: public Policy {
public:
  explicit NoisyPolicy(const Mechanism &m): m_(m), replay_(std::span(&m, 1)) {
    for (const MoveSet &mv: enumerate_moves(m.initial, { 1, nullptr })) {
      if (apply_move(m.initial, mv.arrows) != m.intermediates[0]) {
        decoy_ = make_step(m.initial, mv.arrows);
        break;
      }
    }
  }

  std::vector<Proposal> propose(const State &s, const std::string &goal, Task task,
                                int top_k) override {
    if (s == m_.initial)
      return { { decoy_, 0.0 }, { m_.steps[0], -0.5 } };
    for (const State &t: m_.intermediates)
      if (s == t)
        return replay_.propose(s, goal, task, top_k);
    return {};
  }

private:
  const Mechanism &m_;
  ReplayPolicy replay_;
  MechStep decoy_;
};

} // namespace

TEST_CASE("goal containment") {
  const State s = State::parse("CCO.O.[Na+].[Cl-]");
  CHECK(goal_reached(s, goal_species("OCC")));
  CHECK(goal_reached(s, goal_species("[Cl-].O")));
  CHECK_FALSE(goal_reached(s, goal_species("O.O")));
  CHECK_FALSE(goal_reached(s, goal_species("")));
  CHECK(goal_reached(State::parse("O.O"), goal_species("O.O")));
}

TEST_CASE("replay policy reproduces recorded mechanisms") {
  const std::vector<Mechanism> mechs { load("borohydride.jsonl"),
                                       load("hydride_step.jsonl") };
  ReplayPolicy policy(mechs);
  const Metrics m = evaluate(mechs, policy);
  CHECK(m.steps == 5);
  CHECK(m.reactions == 2);
  for (const auto &[k, v]: m.step_accuracy)
    CHECK(v == doctest::Approx(1.0));
  for (const auto &[w, v]: m.pathway_accuracy)
    CHECK(v == doctest::Approx(1.0));
  CHECK(m.monotone());

  const Mechanism &b = mechs[0];
  const SearchResult r = best_first_search(b.initial, main_product(b), policy);
  REQUIRE(r.solved);
  CHECK(r.stats.expansions == 4);
  CHECK(r.mechanism->intermediates == b.intermediates);
}

TEST_CASE("empty policy scores zero") {
  const std::vector<Mechanism> mechs { load("borohydride.jsonl") };
  EmptyPolicy policy;
  const Metrics m = evaluate(mechs, policy);
  for (const auto &[k, v]: m.step_accuracy)
    CHECK(v == 0.0);
  for (const auto &[w, v]: m.pathway_accuracy)
    CHECK(v == 0.0);
  const SearchResult r = best_first_search(mechs[0].initial, main_product(mechs[0]), policy);
  CHECK_FALSE(r.solved);
  CHECK(r.stats.expansions == 1);
  CHECK(r.reason == "search space exhausted");
}

TEST_CASE("hand-scored step accuracy") {
  const Mechanism b = load("borohydride.jsonl");
  const State s = State::parse("CC(=O)O.[OH-]");
  const std::vector<std::vector<Arrow>> first { enumerate_moves(s).front().arrows };
  const Mechanism p = replay(s, first);
  const std::vector<Mechanism> mechs { b, p, b, p };
  std::map<std::string, int> ranks {
    { b.before(0).canonical(), 0 }, { b.before(1).canonical(), 2 },
    { b.before(2).canonical(), 99 }, { b.before(3).canonical(), 4 },
    { p.before(0).canonical(), 9 },
  };
  REQUIRE(ranks.size() == 5);
  RankedPolicy policy(std::span(mechs.data(), 2), ranks);
  EvalConfig cfg;
  cfg.beam_widths.clear();
  const Metrics m = evaluate(mechs, policy, cfg);
  REQUIRE(m.steps == 10);
  // Ranks per step: 0 2 - 4 9 0 2 - 4 9.
  CHECK(m.step_accuracy.at(1) == doctest::Approx(0.2));
  CHECK(m.step_accuracy.at(3) == doctest::Approx(0.4));
  CHECK(m.step_accuracy.at(5) == doctest::Approx(0.6));
  CHECK(m.step_accuracy.at(10) == doctest::Approx(0.8));
  CHECK(m.monotone());
}

TEST_CASE("wider beam recovers from a misleading first choice") {
  const Mechanism b = load("borohydride.jsonl");
  NoisyPolicy policy(b);
  const std::string goal = main_product(b);
  CHECK(beam_pathways(b.initial, goal, policy, 1, 6).empty());
  const auto wide = beam_pathways(b.initial, goal, policy, 3, 6);
  REQUIRE(wide.size() == 1);
  CHECK(wide[0].mechanism.intermediates == b.intermediates);
  CHECK(wide[0].score == doctest::Approx(-0.5));

  const Metrics m = evaluate(std::span(&b, 1), policy);
  CHECK(m.pathway_accuracy.at(1) == 0.0);
  CHECK(m.pathway_accuracy.at(3) == 1.0);
  CHECK(m.monotone());

  // Best-first backs off the dead end.
  const SearchResult r = best_first_search(b.initial, goal, policy);
  REQUIRE(r.solved);
  CHECK(r.stats.expansions == 5);
  CHECK(r.score == doctest::Approx(-0.5));
}

TEST_CASE("preflight rejects impossible goals without expanding") {
  const Mechanism b = load("borohydride.jsonl");
  ReplayPolicy policy(std::span(&b, 1));
  const SearchResult r = best_first_search(b.initial, "CCl", policy);
  CHECK_FALSE(r.solved);
  CHECK(r.stats.expansions == 0);
  const Validation v = validate_reaction(b.initial, "CCl", policy);
  CHECK_FALSE(v.validated);
  CHECK(v.expansions == 0);
}

TEST_CASE("frontier pops in score order and respects limits") {
  const State s = State::parse("CC(=O)C.[OH-].O");
  HeuristicPolicy policy;
  SearchConfig cfg;
  cfg.budget = 12;
  cfg.max_children = 3;
  const SearchResult r = best_first_search(s, "C(F)(F)F", policy, cfg);
  CHECK_FALSE(r.solved);
  CHECK(r.stats.expansions == 0);
  const SearchResult r2 = best_first_search(s, "CC(O)(O)C", policy, cfg);
  CHECK(r2.stats.expansions <= cfg.budget);
  CHECK(r2.stats.max_children <= cfg.max_children);
  for (std::size_t k = 1; k < r2.stats.expanded_scores.size(); ++k)
    CHECK(r2.stats.expanded_scores[k] <= r2.stats.expanded_scores[k - 1] + 1e-12);
}

TEST_CASE("heuristic proposals are ranked, finite and applicable") {
  const Mechanism b = load("borohydride.jsonl");
  HeuristicPolicy policy;
  const auto props = policy.propose(b.initial, main_product(b), Task::kNoStoichiometry, 10);
  REQUIRE(props.size() == 10);
  std::set<std::string> seen;
  for (std::size_t k = 0; k < props.size(); ++k) {
    CHECK(std::isfinite(props[k].logprob));
    CHECK(props[k].logprob <= 0);
    if (k > 0)
      CHECK(props[k].logprob <= props[k - 1].logprob);
    CHECK(parse_mechsmiles(serialize(props[k].step, Scope::kMinimal)).is_minimal());
    CHECK(seen.insert(apply_step(b.initial, props[k].step).canonical()).second);
  }
}

TEST_CASE("heuristic policy solves the borohydride reduction") {
  const Mechanism b = load("borohydride.jsonl");
  HeuristicPolicy policy;
  const auto t0 = std::chrono::steady_clock::now();
  const SearchResult r = best_first_search(b.initial, main_product(b), policy);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("expansions " << r.stats.expansions << " in " << secs << " s");
  REQUIRE(r.solved);
  CHECK(r.stats.expansions <= 50);
  CHECK(secs <= 10.0);
  const Mechanism check = replay_steps(b.initial, r.mechanism->steps);
  CHECK(check.goal() == r.mechanism->goal());
}

TEST_CASE("external policy protocol") {
  const State s = State::parse("CC=O.[BH4-]");
  const auto req = ExternalPolicy::request(s, "CCO", Task::kElementaryStep, 3);
  CHECK(req["goal"] == "CCO");
  CHECK(req["top_k"] == 3);
  const auto res = nlohmann::json::parse(R"js({"proposals":[
      {"mechsmiles":"garbage","logprob":-1},
      {"mechsmiles":"[H:5][BH3-:1].[CH3:2][CH:3]=[O:4]|((1,5),3);((3,4),4)","logprob":-2},
      {"mechsmiles":"[OH2:1]|(1,1)","logprob":"x"},
      {"mechsmiles":"[OH-:1].[H:2][OH:3]|(1,2);((2,3),3)","logprob":-0.5}]})js");
  const auto props = ExternalPolicy::parse_response(res);
  REQUIRE(props.size() == 2);
  CHECK(props[0].logprob == -0.5);
  CHECK(props[1].logprob == -2);
  CHECK_THROWS(ExternalPolicy::parse_response(nlohmann::json::object()));
}

TEST_CASE("external policy over a child process") {
  const std::string reply =
      R"js({"proposals":[{"mechsmiles":"[OH-:1].[H:2][OH:3]|(1,2);((2,3),3)","logprob":-0.1}]})js";
  auto policy = ExternalPolicy::spawn("while read -r line; do echo '" + reply + "'; done");
  const State s = State::parse("[OH-].O");
  for (int round = 0; round < 3; ++round) {
    const auto props = policy->propose(s, "O.[OH-]", Task::kElementaryStep, 5);
    REQUIRE(props.size() == 1);
    CHECK(apply_step(s, props[0].step) == s);
  }
  auto dead = ExternalPolicy::spawn("exit 0");
  CHECK_THROWS_AS(dead->propose(s, "O", Task::kElementaryStep, 5), Error);
}
