//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mech/convert.h"

namespace mech {

enum class Task {
  kElementaryStep = 1,
  kEquilibrated = 2,
  kNoByproducts = 3,
  kNoStoichiometry = 4,
};

enum class Variant { kRetro, kForward, kNoProduct };

const char *to_string(Task t);
const char *to_string(Variant v);
std::optional<Task> parse_task(std::string_view s);

struct TaskSample {
  Task task;
  std::string input;
  std::string target; // minimal MechSMILES of the next step
  std::string reaction_id;
  int step_index = 0;
  Variant variant = Variant::kForward;

  bool operator==(const TaskSample &) const = default;
};

struct TaskOptions {
  bool retro = true;
  bool forward = true;
  bool no_product = true;
};

// meta.main_product when present, else the goal component with the most
// heavy atoms (ties: smallest canonical string).
std::string main_product(const Mechanism &m);

// meta.products when present, else every goal component.
std::string full_products(const Mechanism &m);

// Per step, retro then forward then product-less samples. Throws Error for
// a mechanism without steps.
std::vector<TaskSample> build_samples(const Mechanism &m, Task task,
                                      const TaskOptions &opts = {});

// Reactant and product text of the step-k sample, before markers.
struct SampleSides {
  std::string reactants;
  std::string products;
};
SampleSides sample_sides(const Mechanism &m, Task task, std::size_t k);

nlohmann::json to_json(const TaskSample &s);
TaskSample sample_from_json(const nlohmann::json &j);

// Fixed-vocabulary tokenizer for sample text: markers, SMILES units
// (bracket atoms split into their fields), arrow punctuation and number
// tokens. Concatenating the token strings gives the input back.
class Tokenizer {
public:
  static constexpr int kVocabularySize = 260;

  Tokenizer();

  std::vector<std::string> split(std::string_view text) const;
  // Throws Error naming the offset of the first symbol the vocabulary
  // cannot cover.
  std::vector<int> encode(std::string_view text) const;
  std::string decode(const std::vector<int> &ids) const;

  int size() const { return static_cast<int>(vocab_.size()); }
  const std::string &token(int id) const { return vocab_.at(id); }
  // Largest number the vocabulary holds (map numbers, ring labels).
  int max_number() const { return max_number_; }

private:
  std::vector<std::string> vocab_;
  std::map<std::string, int, std::less<>> index_;
  int max_number_ = 0;
};

} // namespace mech
