//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <sstream>

#include "mech/taskgen.h"
#include "test_util.h"

using namespace mech;

namespace {

Mechanism load(const std::string &name) {
  std::istringstream in(test::slurp(test::data_path(name)));
  return read_mechanisms(in).front();
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty())
      out.push_back(l);
  return out;
}

} // namespace

TEST_CASE("reference sample strings") {
  Mechanism m = load("hydride_step.jsonl");
  const auto expected = lines(test::slurp(test::data_path("reference_samples.txt")));
  REQUIRE(expected.size() == 12);
  std::vector<std::string> got;
  for (Task t: { Task::kElementaryStep, Task::kEquilibrated, Task::kNoByproducts,
                 Task::kNoStoichiometry })
    for (const TaskSample &s: build_samples(m, t))
      got.push_back(s.input);
  CHECK(got == expected);
}

TEST_CASE("targets replay to the next state") {
  Mechanism m = load("borohydride.jsonl");
  for (Task t: { Task::kElementaryStep, Task::kNoStoichiometry }) {
    const auto samples = build_samples(m, t);
    CHECK(samples.size() == 3 * m.steps.size());
    for (const TaskSample &s: samples) {
      MechStep st = parse_mechsmiles(s.target);
      CHECK(st.is_minimal());
      CHECK(apply_step(m.before(s.step_index), st) == m.intermediates[s.step_index]);
      CHECK(s.input.size() >= 6);
      CHECK(s.input.substr(s.input.size() - 6) == "[mech]");
    }
  }
}

TEST_CASE("task inputs shrink with less information") {
  Mechanism m = load("borohydride.jsonl");
  const auto t3 = build_samples(m, Task::kNoByproducts);
  const auto t4 = build_samples(m, Task::kNoStoichiometry);
  REQUIRE(t3.size() == t4.size());
  for (std::size_t i = 0; i < t3.size(); ++i)
    CHECK(t4[i].input.size() <= t3[i].input.size());
  CHECK(main_product(m) == "CC(O)CCCCO");
}

TEST_CASE("sample counts and toggles") {
  Mechanism m = load("hydride_step.jsonl");
  CHECK(build_samples(m, Task::kElementaryStep).size() == 3);
  TaskOptions only_forward { false, true, false };
  const auto f = build_samples(m, Task::kElementaryStep, only_forward);
  REQUIRE(f.size() == 1);
  CHECK(f[0].variant == Variant::kForward);
  Mechanism empty;
  empty.initial = State::parse("O");
  CHECK_THROWS_AS(build_samples(empty, Task::kElementaryStep), Error);
}

TEST_CASE("sample json round trip") {
  Mechanism m = load("hydride_step.jsonl");
  for (const TaskSample &s: build_samples(m, Task::kEquilibrated)) {
    const auto j = to_json(s);
    CHECK(j.size() == 6);
    CHECK(sample_from_json(j) == s);
  }
}

TEST_CASE("tokenizer") {
  Tokenizer tok;
  CHECK(tok.size() == 260);
  CHECK(tok.split("[mech]") == std::vector<std::string> { "[mech]" });
  CHECK(tok.encode("").empty());
  CHECK(tok.split("[BH3-:2][H:3]")
        == std::vector<std::string> { "[", "B", "H", "3", "-", ":", "2", "]", "[",
                                      "H", ":", "3", "]" });
  CHECK(tok.split("C1CC%12CC1|((2, 3), 4)")
        == std::vector<std::string> { "C", "1", "C", "C", "%", "12", "C", "C", "1",
                                      "|", "(", "(", "2", ",", " ", "3", ")", ",",
                                      " ", "4", ")" });
  CHECK_THROWS_AS(tok.encode("C?C"), Error);
  CHECK_THROWS_AS(tok.encode("[C:999]"), Error);

  Mechanism m = load("borohydride.jsonl");
  for (Task t: { Task::kElementaryStep, Task::kEquilibrated, Task::kNoByproducts,
                 Task::kNoStoichiometry })
    for (const TaskSample &s: build_samples(m, t)) {
      CHECK(tok.decode(tok.encode(s.input)) == s.input);
      CHECK(tok.decode(tok.encode(s.target)) == s.target);
    }
}
