//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/taskgen.h"

#include <algorithm>
#include <cctype>
#include <set>

namespace mech {

using nlohmann::json;

const char *to_string(Task t) {
  switch (t) {
  case Task::kElementaryStep:
    return "elementary-step";
  case Task::kEquilibrated:
    return "equilibrated";
  case Task::kNoByproducts:
    return "no-byproducts";
  case Task::kNoStoichiometry:
    return "no-stoichiometry";
  }
  return "unknown";
}

const char *to_string(Variant v) {
  switch (v) {
  case Variant::kRetro:
    return "retro";
  case Variant::kForward:
    return "forward";
  case Variant::kNoProduct:
    return "no-product";
  }
  return "unknown";
}

std::optional<Task> parse_task(std::string_view s) {
  for (Task t: { Task::kElementaryStep, Task::kEquilibrated, Task::kNoByproducts,
                 Task::kNoStoichiometry }) {
    if (s == to_string(t) || s == std::to_string(static_cast<int>(t)))
      return t;
  }
  return std::nullopt;
}

namespace {

std::string join(const std::vector<std::string> &parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0)
      out += '.';
    out += parts[i];
  }
  return out;
}

int heavy_atoms(const MolGraph &g) {
  int n = 0;
  for (const Atom &a: g.atoms())
    n += !a.is_hydrogen();
  return n;
}

} // namespace

std::string main_product(const Mechanism &m) {
  if (m.meta.contains("main_product"))
    return m.meta["main_product"].get<std::string>();
  const MolGraph &g = m.goal().graph();
  std::string best;
  int best_heavy = -1;
  for (const auto &comp: components(g)) {
    const MolGraph part = subgraph(g, comp);
    const int h = heavy_atoms(part);
    const std::string key = canonical_form(part);
    if (h > best_heavy || (h == best_heavy && key < best)) {
      best_heavy = h;
      best = key;
    }
  }
  return best;
}

std::string full_products(const Mechanism &m) {
  if (m.meta.contains("products"))
    return m.meta["products"].get<std::string>();
  return m.goal().canonical();
}

SampleSides sample_sides(const Mechanism &m, Task task, std::size_t k) {
  const State &before = m.before(k);
  switch (task) {
  case Task::kElementaryStep: {
    const MechStep &step = m.steps[k];
    const MolGraph host = minimal_host(before.graph(), step.arrows);
    const State local = State::from_graph(host, false);
    return { local.canonical(), apply_move(local, step.arrows).canonical() };
  }
  case Task::kEquilibrated:
    return { before.canonical(), full_products(m) };
  case Task::kNoByproducts:
    return { before.canonical(), main_product(m) };
  case Task::kNoStoichiometry: {
    auto sp = before.species();
    sp.erase(std::unique(sp.begin(), sp.end()), sp.end());
    return { join(sp), main_product(m) };
  }
  }
  return {};
}

std::vector<TaskSample> build_samples(const Mechanism &m, Task task,
                                      const TaskOptions &opts) {
  if (m.steps.empty())
    throw Error("mechanism '" + m.reaction_id + "' has no steps");
  std::vector<TaskSample> out;
  for (std::size_t k = 0; k < m.steps.size(); ++k) {
    const SampleSides sides = sample_sides(m, task, k);
    const std::string target = serialize(m.steps[k], Scope::kMinimal);
    const std::string reac = "[reac]" + sides.reactants;
    const std::string prod = "[prod]" + sides.products;
    auto push = [&](Variant v, std::string input) {
      out.push_back({ task, std::move(input), target, m.reaction_id,
                      static_cast<int>(k), v });
    };
    if (opts.retro)
      push(Variant::kRetro, prod + reac + "[mech]");
    if (opts.forward)
      push(Variant::kForward, reac + prod + "[mech]");
    if (opts.no_product)
      push(Variant::kNoProduct, reac + "[mech]");
  }
  return out;
}

json to_json(const TaskSample &s) {
  return { { "task", to_string(s.task) },     { "input", s.input },
           { "target", s.target },            { "reaction_id", s.reaction_id },
           { "step_index", s.step_index },    { "variant", to_string(s.variant) } };
}

TaskSample sample_from_json(const json &j) {
  TaskSample s;
  auto task = parse_task(j.at("task").get<std::string>());
  if (!task)
    throw Error("unknown task " + j.at("task").dump());
  s.task = *task;
  s.input = j.at("input").get<std::string>();
  s.target = j.at("target").get<std::string>();
  s.reaction_id = j.value("reaction_id", "");
  s.step_index = j.value("step_index", 0);
  const std::string v = j.value("variant", "forward");
  s.variant = v == "retro" ? Variant::kRetro
              : v == "no-product" ? Variant::kNoProduct
                                  : Variant::kForward;
  return s;
}

// Tokenizer

Tokenizer::Tokenizer() {
  const char *fixed[] = { "[reac]", "[prod]", "[mech]", "(", ")", "[", "]",
                          ".", "=", "#", "-", "+", ":", "/", "\\", "%", "@",
                          "@@", "|", ";", ",", " ", "b", "c", "n", "o", "p",
                          "s", "se", "as" };
  for (const char *t: fixed)
    vocab_.push_back(t);
  for (int z = 1; z <= 86; ++z)
    vocab_.push_back(std::string(element(z).symbol));
  max_number_ = kVocabularySize - static_cast<int>(vocab_.size()) - 1;
  for (int k = 0; k <= max_number_; ++k)
    vocab_.push_back(std::to_string(k));
  for (int i = 0; i < static_cast<int>(vocab_.size()); ++i)
    index_.emplace(vocab_[i], i);
}

namespace {

class Splitter {
public:
  explicit Splitter(std::string_view s): s_(s) { }

  std::vector<std::string> run() {
    while (pos_ < s_.size()) {
      if (s_.compare(pos_, 6, "[reac]") == 0 || s_.compare(pos_, 6, "[prod]") == 0
          || s_.compare(pos_, 6, "[mech]") == 0) {
        emit(6);
        arrows_ = false;
      } else if (s_[pos_] == '|') {
        emit(1);
        arrows_ = true;
      } else if (arrows_) {
        arrow_token();
      } else {
        smiles_token();
      }
    }
    return std::move(out_);
  }

private:
  [[noreturn]] void fail() const {
    throw Error("tokenizer: no token covers '" + std::string(1, s_[pos_])
                + "' at offset " + std::to_string(pos_));
  }

  void emit(std::size_t n) {
    out_.emplace_back(s_.substr(pos_, n));
    pos_ += n;
  }

  bool digit(std::size_t p) const {
    return p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]));
  }

  void number() {
    std::size_t n = 0;
    while (digit(pos_ + n))
      ++n;
    emit(n);
  }

  void arrow_token() {
    const char c = s_[pos_];
    if (digit(pos_))
      number();
    else if (c == '(' || c == ')' || c == ',' || c == ';' || c == ' ')
      emit(1);
    else
      fail();
  }

  void element_symbol() {
    if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))
        && std::isupper(static_cast<unsigned char>(s_[pos_]))
        && element_by_symbol(s_.substr(pos_, 2)) != nullptr) {
      emit(2);
      return;
    }
    if (s_.compare(pos_, 2, "se") == 0 || s_.compare(pos_, 2, "as") == 0) {
      emit(2);
      return;
    }
    if (std::isupper(static_cast<unsigned char>(s_[pos_]))
        && element_by_symbol(s_.substr(pos_, 1)) != nullptr) {
      emit(1);
      return;
    }
    if (std::string_view("bcnops").find(s_[pos_]) != std::string_view::npos) {
      emit(1);
      return;
    }
    fail();
  }

  void bracket() {
    emit(1); // [
    if (digit(pos_))
      number();
    if (pos_ >= s_.size())
      fail();
    element_symbol();
    if (s_.compare(pos_, 2, "@@") == 0)
      emit(2);
    else if (pos_ < s_.size() && s_[pos_] == '@')
      emit(1);
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      emit(1);
      if (digit(pos_))
        number();
    }
    while (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      emit(1);
      if (digit(pos_))
        number();
    }
    if (pos_ < s_.size() && s_[pos_] == ':') {
      emit(1);
      if (!digit(pos_))
        fail();
      number();
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      fail();
    emit(1);
  }

  void smiles_token() {
    const char c = s_[pos_];
    if (c == '[') {
      bracket();
    } else if (s_.compare(pos_, 2, "Cl") == 0 || s_.compare(pos_, 2, "Br") == 0) {
      emit(2);
    } else if (std::string_view("BCNOPSFIbcnops").find(c) != std::string_view::npos) {
      emit(1);
    } else if (std::string_view("()=#-+./\\:").find(c) != std::string_view::npos) {
      emit(1);
    } else if (digit(pos_)) {
      emit(1); // ring label
    } else if (c == '%' && digit(pos_ + 1) && digit(pos_ + 2)) {
      emit(1);
      emit(2);
    } else {
      fail();
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  bool arrows_ = false;
  std::vector<std::string> out_;
};

} // namespace

std::vector<std::string> Tokenizer::split(std::string_view text) const {
  return Splitter(text).run();
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
  std::vector<int> ids;
  std::size_t offset = 0;
  for (const std::string &t: split(text)) {
    auto it = index_.find(t);
    if (it == index_.end())
      throw Error("tokenizer: token '" + t + "' at offset "
                  + std::to_string(offset) + " is outside the vocabulary");
    ids.push_back(it->second);
    offset += t.size();
  }
  return ids;
}

std::string Tokenizer::decode(const std::vector<int> &ids) const {
  std::string out;
  for (int id: ids)
    out += token(id);
  return out;
}

} // namespace mech
