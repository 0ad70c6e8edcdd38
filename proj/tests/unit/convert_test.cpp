//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "mech/convert.h"
#include "oracles.h"
#include "test_util.h"

using namespace mech;
using nlohmann::json;

namespace {

Mechanism load(const std::string &name) {
  std::istringstream in(test::slurp(test::data_path(name)));
  auto ms = read_mechanisms(in);
  REQUIRE(ms.size() == 1);
  return ms.front();
}

} // namespace

TEST_CASE("infer arrows: identity and the hydride pair") {
  MolGraph r = parse_smiles("[BH3-:2][H:3].[CH:4](CCCC(C)=O)=[O:1]");

  // Products written with the same map numbers.
  MolGraph p = parse_smiles("[BH3:2].[H:3][CH2:4](CCCC(C)=O)[O-:1]");
  // Heavy atoms without maps cannot be paired.
  CHECK_THROWS_AS(infer_arrows(r, p), ConvertError);

  MolGraph rm = parse_smiles(
      "[BH3-:2][H:3].[CH:4]([CH2:5][CH2:6][CH2:7][C:8]([CH3:9])=[O:10])=[O:1]");
  MolGraph pm = parse_smiles(
      "[BH3:2].[H:3][CH:4]([CH2:5][CH2:6][CH2:7][C:8]([CH3:9])=[O:10])[O-:1]");
  Inference inf = infer_arrows(rm, pm);
  CHECK(inf.arrows == std::vector { Arrow::bond_attack(2, 3, 4), Arrow::ionize(4, 1) });
  CHECK(infer_arrows(rm, rm).arrows.empty());

  // With the hydrogen left implicit the transferred one gets a fresh map.
  MolGraph ri = parse_smiles(
      "[BH4-:2].[CH:4]([CH2:5][CH2:6][CH2:7][C:8]([CH3:9])=[O:10])=[O:1]");
  MolGraph pi = parse_smiles(
      "[BH3:2].[CH2:4]([CH2:5][CH2:6][CH2:7][C:8]([CH3:9])=[O:10])[O-:1]");
  Inference inf2 = infer_arrows(ri, pi);
  REQUIRE(inf2.arrows.size() == 2);
  CHECK(inf2.arrows[0].kind == ArrowKind::kBondAttack);
  CHECK(inf2.arrows[0].a == 2);
  CHECK(inf2.arrows[0].c == 4);
  CHECK(inf2.arrows[1] == Arrow::ionize(4, 1));
  CHECK(State::from_graph(apply_arrows(inf2.reactant, inf2.arrows)).canonical()
        == "B.CC(=O)CCCC[O-]");
}

TEST_CASE("infer arrows: errors") {
  CHECK_THROWS_AS(infer_arrows(parse_smiles("[CH4:1]"), parse_smiles("[NH3:1]")),
                  ConvertError);
  CHECK_THROWS_AS(infer_arrows(parse_smiles("[OH2:1]"), parse_smiles("[OH-:1]")),
                  ConvertError);
  try {
    InferOptions tight;
    tight.max_arrows = 1;
    infer_arrows(parse_smiles("[OH-:1].[OH2:2]"), parse_smiles("[OH2:1].[OH-:2]"), tight);
    FAIL("inferred with one arrow");
  } catch (const ConvertError &e) {
    CHECK(e.reason() == "no-arrow-set");
  }
}

TEST_CASE("infer arrows recovers random moves minimally") {
  std::mt19937 rng(41);
  const char *seeds[] = { "CC(=O)CCCC=O.O.[BH4-]", "C=O.[OH-].O", "CC(=O)OC.[OH-]",
                          "C=CC=O.[NH3]" };
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    State s = State::parse(seeds[t % 4]);
    const auto moves = enumerate_moves(s, { 1 + t % 3 });
    if (moves.empty())
      continue;
    const MoveSet &m = moves[rng() % moves.size()];
    const MolGraph product = apply_arrows(s.graph(), m.arrows);
    Inference inf = infer_arrows(s.graph(), product);
    CHECK(write_smiles(apply_arrows(inf.reactant, inf.arrows), MapMode::kAll)
          == write_smiles(product, MapMode::kAll));
    CHECK(inf.arrows.size() <= m.arrows.size());
    std::set<int> touched;
    for (const Arrow &a: m.arrows) {
      for (int x: referenced_maps(std::span(&a, 1)))
        touched.insert(x);
    }
    std::vector<int> maps(touched.begin(), touched.end());
    if (inf.arrows.size() <= 2)
      CHECK_FALSE(test::smaller_set_exists(s.graph(), product, maps, inf.arrows.size()));
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("segment arrows") {
  MolGraph r = parse_smiles("[BH3-:2][H:3].[CH:4](CCCC(C)=O)=[O:1].[H:21][OH:20]");
  const std::vector<Arrow> flat { Arrow::bond_attack(2, 3, 4), Arrow::ionize(4, 1),
                                  Arrow::attack(1, 21), Arrow::ionize(21, 20) };
  Mechanism m = segment_arrows(r, flat);
  REQUIRE(m.steps.size() == 2);
  CHECK(m.steps[0].arrows.size() == 2);
  CHECK(m.steps[1].arrows.size() == 2);
  CHECK(m.goal().canonical() == "B.CC(=O)CCCCO.[OH-]");

  Mechanism pt = segment_arrows(parse_smiles("[OH-:1].[H:2][O:3][H:4]"),
                                std::vector { Arrow::attack(1, 2), Arrow::ionize(2, 3) });
  CHECK(pt.steps.size() == 1);

  try {
    segment_arrows(r, std::vector { Arrow::bond_attack(2, 3, 4) });
    FAIL("segmented an unstable tail");
  } catch (const ConvertError &e) {
    CHECK(e.reason() == "no-stable-prefix");
  }
}

TEST_CASE("smirks with arrow code") {
  MechStep st = from_smirks_arrowcode(
      "[OH-:1].[H:2][OH:3]>>[H:2][OH:1].[OH-:3] 1=2;2,3=3");
  CHECK(st.arrows == std::vector { Arrow::attack(1, 2), Arrow::ionize(2, 3) });

  auto reason = [](const std::string &line) {
    try {
      from_smirks_arrowcode(line);
    } catch (const ConvertError &e) {
      return e.reason();
    }
    return std::string("accepted");
  };
  CHECK(reason("[OH-:1].[H:2][OH:3]>>[H:2][OH:1].[OH-:3] 1=2;2,3=9") == "dangling-map");
  CHECK(reason("[OH-:1].[H:2][OH:3]>>[OH-:1].[H:2][OH:3] 1=2;2,3=3") == "cross-check-mismatch");
  CHECK(reason("[OH-:1].[H:2][OH:3]>>[H:2][OH:1].[OH-:3] 1>2") == "malformed-arrowcode");
}

TEST_CASE("reference mechanisms replay") {
  Mechanism m = load("borohydride.jsonl");
  REQUIRE(m.steps.size() == 4);
  CHECK(m.initial.canonical() == "CC(=O)CCCC=O.O.O.[BH4-].[BH4-]");
  CHECK(m.intermediates[0].canonical() == "B.CC(=O)CCCC[O-].O.O.[BH4-]");
  CHECK(m.goal().canonical() == "B.B.CC(O)CCCCO.[OH-].[OH-]");
  const Formula f = formula_multiset(m.initial.graph());
  for (const State &s: m.intermediates) {
    CHECK(is_stable(s.graph()));
    CHECK(formula_multiset(s.graph()) == f);
  }
  // Map numbers of the curated record survive replay.
  CHECK(m.steps[0].arrows == std::vector { Arrow::bond_attack(2, 3, 4), Arrow::ionize(4, 1) });
  CHECK(m.steps[3].arrows == std::vector { Arrow::attack(12, 23), Arrow::ionize(23, 22) });
}

TEST_CASE("unified records are a fixed point") {
  Mechanism m = load("borohydride.jsonl");
  const json once = to_json(m);
  const json twice = to_json(mechanism_from_json(once));
  CHECK(once == twice);
  CHECK(once["steps"].size() == 4);
  CHECK(once["initial_smiles"].get<std::string>().find("[H:21]") != std::string::npos);
}

TEST_CASE("convert streams keep input order and account for rejects") {
  const std::string input =
      "[BH3-:2][H:3].[CH:4](CCCC(C)=O)=[O:1].[H:21][OH:20]\t((2,3),4);((4,1),1);(1,21);((21,20),20)\tr1\n"
      "[OH-:1].[H:2][O:3][H:4]|[(1, 2), ((2, 3), 3)]\n"
      "[CH4:1]\t(1,9)\tbad\n"
      "\n"
      "[OH-:1].[H:2][O:3][H:4]\t[[1,2],[[2,3],3]]\tr4\n";
  for (int jobs: { 1, 3 }) {
    std::istringstream in(input);
    std::ostringstream out, rej;
    ConvertOptions opts;
    opts.format = SourceFormat::kMechUspto;
    opts.jobs = jobs;
    opts.chunk = 2;
    const ConvertSummary sum = convert_stream(in, out, &rej, opts);
    CHECK(sum.records == 4);
    CHECK(sum.mechanisms == 3);
    CHECK(sum.steps == 4);
    CHECK(sum.rejected_records == 1);
    std::istringstream back(out.str());
    const auto ms = read_mechanisms(back);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0].reaction_id == "r1");
    CHECK(ms[1].reaction_id == "line2");
    CHECK(ms[2].reaction_id == "r4");
    const json r = json::parse(rej.str());
    CHECK(r["reaction_id"] == "bad");
    CHECK(r["reason"] == "dangling-map");
    CHECK(r["lines"] == json::array({ 3 }));
  }
}

TEST_CASE("mapped-pair records group into mechanisms") {
  const std::string input =
      "[BH3-:2][H:3].[CH:4]([CH3:5])=[O:1].[OH2:20]>>[BH3:2].[H:3][CH:4]([CH3:5])[O-:1].[OH2:20]\n"
      "[BH3:2].[H:3][CH:4]([CH3:5])[O-:1].[OH2:20]>>[BH3:2].[H:3][CH:4]([CH3:5])[OH:1].[OH-:20]\n"
      "[OH-:1].[OH2:2]>>[OH2:1].[OH-:2],pt\n";
  std::istringstream in(input);
  std::ostringstream out, rej;
  ConvertOptions opts;
  opts.format = SourceFormat::kFlower;
  const ConvertSummary sum = convert_stream(in, out, &rej, opts);
  CHECK(sum.mechanisms == 2);
  CHECK(sum.steps == 3);
  CHECK(rej.str().empty());
  std::istringstream back(out.str());
  const auto ms = read_mechanisms(back);
  REQUIRE(ms.size() == 2);
  CHECK(ms[0].goal().canonical() == "B.CCO.[OH-]");
  CHECK(ms[1].reaction_id == "pt");
}

TEST_CASE("smirks records convert") {
  const std::string input =
      "[OH-:1].[H:2][OH:3]>>[H:2][OH:1].[OH-:3] 1=2;2,3=3\n"
      "[OH-:1].[H:2][OH:3]>>[H:2][OH:1].[OH-:3] 1=2;2,3=2\n";
  std::istringstream in(input);
  std::ostringstream out, rej;
  ConvertOptions opts;
  opts.format = SourceFormat::kPmechdb;
  const ConvertSummary sum = convert_stream(in, out, &rej, opts);
  CHECK(sum.mechanisms == 1);
  CHECK(sum.rejected_records == 1);
  const json r = json::parse(rej.str());
  CHECK(r["reason"] == "apply-failed");
  const json ok = json::parse(out.str());
  CHECK(ok["meta"]["source_lengths"][0] == 50);
}
