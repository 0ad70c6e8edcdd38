//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "mech/engine.h"
#include "oracles.h"
#include "test_util.h"

using namespace mech;

namespace {

std::set<std::vector<Arrow>> as_sets(const std::vector<MoveSet> &moves) {
  std::set<std::vector<Arrow>> out;
  for (const MoveSet &m: moves) {
    std::vector<Arrow> k = m.arrows;
    std::sort(k.begin(), k.end());
    out.insert(k);
  }
  return out;
}

} // namespace

TEST_CASE("reference hydride transfer") {
  MechStep st = parse_mechsmiles(
      "[BH3-:2][H:3].[CH:4](CCCC(C)=O)=[O:1]|((2, 3), 4);((4, 1), 1)");
  State s = State::from_graph(st.host);
  State t = apply_move(s, st.arrows);
  CHECK(t.canonical() == "B.CC(=O)CCCC[O-]");
  CHECK(formula_multiset(t.graph()) == formula_multiset(s.graph()));

  // The same step inside the full reactant state.
  State full = State::parse("CC(=O)CCCC=O.O.[BH4-]");
  CHECK(apply_step(full, st).canonical() == "B.CC(=O)CCCC[O-].O");
}

TEST_CASE("the hydride arrow alone leaves an unstable state") {
  State s = State::from_graph(parse_smiles("[BH3-:2][H:3].[CH:4](CCCC(C)=O)=[O:1]"));
  const Arrow first[] = { Arrow::bond_attack(2, 3, 4) };
  const Arrow second[] = { Arrow::ionize(4, 1) };
  CHECK_THROWS_AS(apply_move(s, first), ApplyError);
  // The carbonyl heterolysis alone gives a carbocation, a legal sextet.
  CHECK(apply_move(s, second).canonical() == "CC(=O)CCC[CH+][O-].[BH4-]");
}

TEST_CASE("empty arrow set is the identity") {
  State s = State::parse("CC(=O)CCCC=O.O.[BH4-]");
  State t = apply_move(s, std::vector<Arrow> {});
  CHECK(t == s);
  CHECK(t.graph() == s.graph());
}

TEST_CASE("proton transfer") {
  State s = State::from_graph(parse_smiles("[OH-:1].[H:2][O:3][H:4]"));
  const std::vector<Arrow> arrows { Arrow::attack(1, 2), Arrow::ionize(2, 3) };
  State t = apply_move(s, arrows);
  CHECK(t.canonical() == "O.[OH-]");
  CHECK(formula_multiset(t.graph()).charge == -1);
  CHECK(formula_multiset(t.graph()) == formula_multiset(s.graph()));
  const int h = t.graph().find_map(2);
  CHECK(t.graph().bond_order(h, t.graph().find_map(1)) == 1);
  CHECK(t.graph().find_bond(h, t.graph().find_map(3)) < 0);

  // Collapsing the bond onto the hydrogen instead leaves a dianion hydrogen.
  const std::vector<Arrow> reversed { Arrow::attack(1, 2), Arrow::ionize(3, 2) };
  try {
    apply_move(s, reversed);
    FAIL("accepted");
  } catch (const ApplyError &e) {
    CHECK(e.kind() == ApplyErrorKind::kUnstable);
    REQUIRE_FALSE(e.violations().empty());
    CHECK(e.violations()[0].map != 0);
  }

  const auto moves = enumerate_moves(s, { 2 });
  CHECK(std::find_if(moves.begin(), moves.end(), [&](const MoveSet &m) {
          return m.arrows == arrows;
        }) != moves.end());
}

TEST_CASE("apply preconditions") {
  State s = State::from_graph(parse_smiles("[CH4:1].[OH2:2]"));
  auto kind = [&](std::vector<Arrow> arrows) {
    try {
      apply_move(s, arrows);
    } catch (const ApplyError &e) {
      return e.kind();
    }
    FAIL("accepted");
    return ApplyErrorKind::kUnstable;
  };
  CHECK(kind({ Arrow::attack(1, 2) }) == ApplyErrorKind::kNoLonePair);
  CHECK(kind({ Arrow::ionize(1, 2) }) == ApplyErrorKind::kMissingBond);
  CHECK(kind({ Arrow::attack(2, 99) }) == ApplyErrorKind::kMissingMap);
  const int h = s.graph().atom(s.graph().neighbors(s.graph().find_map(1))[0].atom).map;
  CHECK(kind({ Arrow::ionize(1, h), Arrow::ionize(h, 1) })
        == ApplyErrorKind::kNegativeBondOrder);
}

TEST_CASE("inert species have no moves") {
  CHECK(enumerate_moves(State::parse("[He]")).empty());
  CHECK(enumerate_moves(State::parse("[Ne]")).empty());
}

TEST_CASE("enumeration matches brute force on small states") {
  const char *states[] = { "[OH-].O", "O.O", "[BH4-]", "C=O.[OH-]", "[NH4+].[OH-]",
                           "CO", "C=C", "[CH3-].[NH4+]", "B.[F-]", "N.B", "OO" };
  for (const char *smi: states) {
    State s = State::parse(smi);
    if (s.graph().num_atoms() > 8)
      continue;
    for (int L: { 1, 2, 3 }) {
      if (L == 3 && s.graph().num_atoms() > 6)
        continue;
      CAPTURE(smi);
      CAPTURE(L);
      const auto fast = enumerate_moves(s, { L });
      const auto slow = test::BruteForce(s, L).run();
      CHECK(fast.size() == slow.size());
      CHECK(as_sets(fast) == slow);
    }
  }
}

TEST_CASE("enumeration is sorted, deterministic and sound") {
  State s = State::parse("CC(=O)CCCC=O.O.[BH4-]");
  const auto moves = enumerate_moves(s, { 2 });
  CHECK(std::is_sorted(moves.begin(), moves.end()));
  CHECK(enumerate_moves(s, { 2 }) == moves);
  const Formula f = formula_multiset(s.graph());
  for (const MoveSet &m: moves) {
    State t = apply_move(s, m.arrows);
    CHECK(formula_multiset(t.graph()) == f);
    CHECK(is_stable(t.graph()));
    CHECK(m.arrows.size() <= 2);
  }
}

TEST_CASE("equilibrated reactant state has over a thousand moves") {
  State s = State::parse("CC(=O)CCCC=O.O.O.[BH4-].[BH4-]");
  CHECK(enumerate_moves(s, { 2 }).size() > 1000);
}

TEST_CASE("state numbering") {
  State s = State::parse("[OH-:7].O");
  std::set<int> maps;
  for (const Atom &a: s.graph().atoms()) {
    CHECK(a.map != 0);
    CHECK(a.hcount == 0);
    maps.insert(a.map);
  }
  CHECK(maps.size() == 5);
  CHECK(s.graph().atom(s.graph().find_map(7)).element == kOxygen);
  CHECK(*maps.rbegin() == 11);
  CHECK_THROWS_AS(State::parse("[CH3]"), ApplyError);
}

TEST_CASE("resolve step prefers identical numbering") {
  State s = State::from_graph(parse_smiles("[OH-:1].[H:2][O:3][H:4].[H:5][O:6][H:7]"));
  MechStep st = parse_mechsmiles("[OH-:1].[H:5][O:6][H:7]|(1,5);((5,6),6)");
  const auto arrows = resolve_step(s, st);
  CHECK(arrows == std::vector { Arrow::attack(1, 5), Arrow::ionize(5, 6) });
  // Foreign numbering lands on some isomorphic atoms.
  MechStep foreign = parse_mechsmiles("[OH-:31].[H:32][OH:33]|(31,32);((32,33),33)");
  CHECK(apply_step(s, foreign).canonical() == "O.O.[OH-]");
  CHECK_THROWS_AS(resolve_step(s, parse_mechsmiles("[NH3:1]|")), Error);
}

TEST_CASE("randomized conservation") {
  std::mt19937 rng(23);
  State s = State::parse("CC(=O)CCCC=O.O.O.[BH4-].[BH4-]");
  const Formula f = formula_multiset(s.graph());
  int applied = 0;
  for (int walk = 0; walk < 20; ++walk) {
    State cur = s;
    for (int d = 0; d < 5; ++d) {
      const auto moves = enumerate_moves(cur, { 2 });
      if (moves.empty())
        break;
      cur = apply_move(cur, moves[rng() % moves.size()].arrows);
      CHECK(formula_multiset(cur.graph()) == f);
      ++applied;
    }
  }
  CHECK(applied > 50);
}
