//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mech/convert.h"
#include "mech/taskgen.h"

namespace mech {

struct Proposal {
  MechStep step;
  double logprob = 0;
};

// Goal text is dot-separated SMILES; the goal holds when every goal species
// is present in the state (multiset containment).
bool goal_reached(const State &s, const std::vector<std::string> &goal_species);
std::vector<std::string> goal_species(std::string_view goal_smiles);

class Policy {
public:
  virtual ~Policy() = default;
  // Ranked proposals with finite, non-increasing scores.
  virtual std::vector<Proposal> propose(const State &s, const std::string &goal,
                                        Task task, int top_k) = 0;
};

// Emits the recorded next step with score 0 whenever the state (or a
// subset of it holding the step's reactants) matches a recorded state.
class ReplayPolicy: public Policy {
public:
  ReplayPolicy() = default;
  explicit ReplayPolicy(std::span<const Mechanism> mechs);
  void add(const Mechanism &m);

  std::vector<Proposal> propose(const State &s, const std::string &goal, Task task,
                                int top_k) override;

private:
  std::map<std::string, std::vector<MechStep>> by_state_;
  std::vector<std::pair<std::vector<std::string>, MechStep>> by_host_;
};

// Hand-coded priors over enumerate_moves output. Moves are tiered by a
// count of implausible features (C-C cleavage, O-O bonds, dianions, attack
// on anions or on lone-pair heteroatoms), then by distance between the
// goal and the closest component in WL atom-environment labels, then by
// change in total absolute charge, then by electronegativity gap across
// the first arrow. Scores are uniform inside a tier and drop by `tier_gap`
// per tier before normalization.
class HeuristicPolicy: public Policy {
public:
  explicit HeuristicPolicy(int max_arrows = 2, double tier_gap = 3.0)
      : max_arrows_(max_arrows), tier_gap_(tier_gap) { }

  std::vector<Proposal> propose(const State &s, const std::string &goal, Task task,
                                int top_k) override;

private:
  int max_arrows_;
  double tier_gap_;
};

// Line-delimited JSON over a child process's stdin/stdout, or HTTP POST.
// Request {state_mechsmiles_host, goal, task, top_k}; response
// {proposals: [{mechsmiles, logprob}]}. Calls are serialized.
class ExternalPolicy: public Policy {
public:
  static std::unique_ptr<ExternalPolicy> spawn(const std::string &command);
  // `url` like http://host:port/path
  static std::unique_ptr<ExternalPolicy> http(const std::string &url);
  ~ExternalPolicy() override;

  std::vector<Proposal> propose(const State &s, const std::string &goal, Task task,
                                int top_k) override;

  static nlohmann::json request(const State &s, const std::string &goal, Task task,
                                int top_k);
  // Malformed entries are skipped; proposals are re-sorted by score.
  static std::vector<Proposal> parse_response(const nlohmann::json &j);

private:
  ExternalPolicy() = default;
  nlohmann::json exchange(const nlohmann::json &req);

  std::mutex mu_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::string host_;
  int port_ = 0;
  std::string path_;
};

struct SearchConfig {
  int budget = 50;       // node expansions
  int top_k = 10;        // proposals requested per node
  int max_children = 5;  // children kept per node
  int beam_width = 1;
  int max_depth = 12;
  Task task = Task::kNoStoichiometry;
};

struct SearchStats {
  int expansions = 0;
  int invalid_proposals = 0;
  // cum_score of each expanded node, in expansion order.
  std::vector<double> expanded_scores;
  int max_children = 0;
};

struct SearchResult {
  bool solved = false;
  std::optional<Mechanism> mechanism;
  double score = 0;
  std::string reason;
  // Deepest path explored when unsolved.
  std::vector<MechStep> best_partial;
  SearchStats stats;
};

SearchResult best_first_search(const State &initial, const std::string &goal,
                               Policy &policy, const SearchConfig &cfg = {});

struct Pathway {
  Mechanism mechanism;
  double score = 0;
};

// Goal-reaching sequences from a beam of `width`, best score first.
std::vector<Pathway> beam_pathways(const State &initial, const std::string &goal,
                                   Policy &policy, int width, int max_depth,
                                   int top_k = 10,
                                   Task task = Task::kNoStoichiometry);

struct Metrics {
  std::size_t steps = 0;
  std::size_t reactions = 0;
  std::map<int, double> step_accuracy;     // keyed by k
  std::map<int, double> pathway_accuracy;  // keyed by beam width
  bool monotone() const;
  nlohmann::json to_json() const;
  std::string table() const;
};

struct EvalConfig {
  std::vector<int> ks { 1, 3, 5, 10 };
  std::vector<int> beam_widths { 1, 3 };
  Task task = Task::kNoStoichiometry;
  int extra_depth = 2; // beam depth beyond the true step count
  // Mechanisms scored in parallel; the policy must tolerate concurrent
  // propose() calls (all policies here do).
  int jobs = 1;
};

// Step accuracy: a proposal is right when applying it gives the recorded
// next state. Pathway accuracy: some beam candidate follows the recorded
// state sequence.
Metrics evaluate(std::span<const Mechanism> mechs, Policy &policy,
                 const EvalConfig &cfg = {});

struct Validation {
  bool validated = false;
  std::optional<Mechanism> mechanism;
  std::string report;
  int expansions = 0;
};

// Not finding a mechanism is advisory, not proof of impossibility.
Validation validate_reaction(const State &reactants, const std::string &product,
                             Policy &policy, const SearchConfig &cfg = {});

// The goal text used for a task: main product, or every product for the
// equilibrated task.
std::string task_goal(const Mechanism &m, Task task);

// "heuristic[:L]", "replay:<mechanisms.jsonl>", "http://host:port/path" or
// "cmd:<shell command>". Throws Error on an unknown spec.
std::unique_ptr<Policy> make_policy(const std::string &spec);

} // namespace mech
