//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <random>
#include <sstream>

#include "mech/applications.h"
#include "mech/taskgen.h"
#include "test_util.h"

using namespace mech;

namespace {

Mechanism load(const std::string &name) {
  std::istringstream in(test::slurp(test::data_path(name)));
  return read_mechanisms(in).front();
}

// Seeded random walk over enumerated moves.
Mechanism random_walk(const std::string &smiles, int steps, std::mt19937 &rng) {
  const State s = State::parse(smiles);
  std::vector<std::vector<Arrow>> arrows;
  State cur = s;
  for (int k = 0; k < steps; ++k) {
    const auto moves = enumerate_moves(cur, { 2, nullptr });
    if (moves.empty())
      break;
    const auto &mv = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    arrows.push_back(mv.arrows);
    cur = apply_move(cur, mv.arrows);
  }
  return replay(s, arrows);
}

// Initial component index of every map number.
std::map<int, int> component_of(const MolGraph &g) {
  std::map<int, int> out;
  const auto comps = components(g);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int i: comps[c])
      out[g.atom(i).map] = static_cast<int>(c);
  return out;
}

const std::vector<int> *find_component(const std::vector<std::vector<int>> &comps,
                                       const MolGraph &g, const std::string &key) {
  for (const auto &c: comps)
    if (canonical_form(subgraph(g, c)) == key)
      return &c;
  return nullptr;
}

} // namespace

TEST_CASE("hydride hydrogen traces back to borohydride") {
  const Mechanism m = load("hydride_step.jsonl");
  const AtomMap map = derive_atom_map(m);
  const MolGraph &g0 = m.initial.graph();
  const MolGraph &g1 = m.goal().graph();
  const auto origin = component_of(g0);
  const auto comps0 = components(g0);
  const auto comps1 = components(g1);
  const auto *product = find_component(comps1, g1, canonical_form(parse_smiles("CC(=O)CCCC[O-]")));
  REQUIRE(product != nullptr);
  int from_boron = 0;
  for (int i: *product) {
    if (!g1.atom(i).is_hydrogen())
      continue;
    // Invert the map: which initial atom lands here?
    int source = 0;
    for (const auto &[a, b]: map.pairs)
      if (b == g1.atom(i).map)
        source = a;
    REQUIRE(source != 0);
    if (canonical_form(subgraph(g0, comps0[origin.at(source)])) == "[BH4-]")
      ++from_boron;
  }
  CHECK(from_boron == 1);
  CHECK(map.mapped_reaction.find(">>") != std::string::npos);
}

TEST_CASE("full reduction draws hydrogens from borohydride and water") {
  const Mechanism m = load("borohydride.jsonl");
  const AtomMap map = derive_atom_map(m);
  const MolGraph &g0 = m.initial.graph();
  const MolGraph &g1 = m.goal().graph();
  const auto origin = component_of(g0);
  const auto comps0 = components(g0);
  const auto comps1 = components(g1);
  const auto *product = find_component(comps1, g1, canonical_form(parse_smiles("CC(O)CCCCO")));
  REQUIRE(product != nullptr);
  std::map<std::string, int> sources;
  for (int i: *product) {
    if (!g1.atom(i).is_hydrogen())
      continue;
    const int c = origin.at(g1.atom(i).map);
    const std::string species = canonical_form(subgraph(g0, comps0[c]));
    if (species != canonical_form(parse_smiles("CC(=O)CCCC=O")))
      ++sources[species];
  }
  CHECK(sources["[BH4-]"] == 2);
  CHECK(sources["O"] == 2);
  CHECK(sources.size() == 2);
  for (const auto &[a, b]: map.pairs)
    CHECK(a == b);
}

TEST_CASE("atom map of a zero-step mechanism is the identity") {
  const State s = State::parse("CCO.[Na+]");
  const Mechanism m = replay(s, {});
  const AtomMap map = derive_atom_map(m);
  CHECK(map.pairs.size() == static_cast<std::size_t>(s.graph().num_atoms()));
  for (const auto &[a, b]: map.pairs)
    CHECK(a == b);
  CHECK(map.image(1) == 1);
  CHECK(map.image(1000) == 0);
}

TEST_CASE("atom maps are element-preserving bijections on random mechanisms") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mechanism m = random_walk(trial % 2 ? "CC(=O)C.[OH-].O" : "C=O.[BH4-].O", 3, rng);
    const AtomMap map = derive_atom_map(m);
    const MolGraph &g0 = m.initial.graph();
    const MolGraph &g1 = m.goal().graph();
    REQUIRE(map.pairs.size() == static_cast<std::size_t>(g0.num_atoms()));
    std::set<int> images;
    for (const auto &[a, b]: map.pairs) {
      CHECK(g0.atom(g0.find_map(a)).element == g1.atom(g1.find_map(b)).element);
      images.insert(b);
    }
    CHECK(images.size() == map.pairs.size());
  }
}

TEST_CASE("tampered mechanisms fail to map") {
  Mechanism m = load("hydride_step.jsonl");
  m.intermediates[0] = m.initial;
  CHECK_THROWS_AS(derive_atom_map(m), Error);
}

TEST_CASE("suzuki roles and catalyst-aware template") {
  const Mechanism m = load("suzuki.jsonl");
  const auto roles = classify_roles(m);
  std::map<std::string, std::vector<Role>> by_species;
  for (const SpeciesRole &r: roles)
    by_species[r.smiles].push_back(r.role);
  auto key = [](const char *s) { return canonical_form(parse_smiles(s)); };
  const std::string pd = key("[P+](c1ccccc1)(c1ccccc1)(c1ccccc1)[Pd-2][P+](c1ccccc1)(c1ccccc1)c1ccccc1");
  CHECK(by_species[pd] == std::vector { Role::kCatalyst });
  CHECK(by_species[key("Cc1ccc(Br)cc1")] == std::vector { Role::kProductContributor });
  CHECK(by_species[key("OB(O)c1ccccc1")] == std::vector { Role::kProductContributor });
  CHECK(by_species[key("[O-]C(=O)[O-]")] == std::vector { Role::kByproductContributor });
  CHECK(by_species[key("[K+]")] == std::vector { Role::kSpectator, Role::kSpectator });
  CHECK(by_species[key("O")] == std::vector { Role::kSpectator });

  const MechTemplate full = extract_template(m, MechTemplate::kInfinite, roles);
  bool has_pd = false;
  for (const TemplateSpecies &s: full.species) {
    CHECK(s.role != Role::kSpectator);
    if (s.role == Role::kCatalyst) {
      has_pd = s.pattern.find("Pd") != std::string::npos;
      // Whole species at infinite radius.
      for (const SpeciesRole &r: roles)
        if (r.role == Role::kCatalyst)
          CHECK(s.atoms.size() == r.maps.size());
    }
  }
  CHECK(has_pd);
  CHECK(full.to_string().find("{catalyst}") != std::string::npos);
  CHECK(full.to_string().find("[K+]") == std::string::npos);
  CHECK(full.steps.size() == 4);
  CHECK(full.to_json()["radius"] == "inf");
}

TEST_CASE("water takes part in the full borohydride reduction") {
  const Mechanism m = load("borohydride.jsonl");
  for (const SpeciesRole &r: classify_roles(m)) {
    CHECK(r.role != Role::kSpectator);
    if (r.smiles == "O")
      CHECK(r.role == Role::kProductContributor);
  }
}

TEST_CASE("roles partition species and follow arrow participation") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    Mechanism m = random_walk("CC(=O)C.[OH-].O.[Na+]", 1 + trial % 3, rng);
    const std::set<int> touched = referenced_atoms(m);
    const auto roles = classify_roles(m);
    CHECK(roles.size() == components(m.initial.graph()).size());
    std::size_t atoms = 0;
    for (const SpeciesRole &r: roles) {
      atoms += r.maps.size();
      const bool hit = std::any_of(r.maps.begin(), r.maps.end(),
                                   [&](int v) { return touched.count(v) > 0; });
      CHECK(hit == (r.role != Role::kSpectator));
      if (r.role == Role::kCatalyst)
        CHECK(m.goal().species().end()
              != std::find(m.goal().species().begin(), m.goal().species().end(), r.smiles));
    }
    CHECK(atoms == static_cast<std::size_t>(m.initial.graph().num_atoms()));

    // Radius 0 holds exactly the touched atoms; radii nest.
    const MechTemplate t0 = extract_template(m, 0, roles);
    std::set<int> zero;
    for (const TemplateSpecies &s: t0.species) {
      CHECK(s.atoms == s.anchors);
      zero.insert(s.atoms.begin(), s.atoms.end());
    }
    CHECK(zero == touched);
    std::vector<std::set<int>> prev(t0.species.size());
    for (int r = 0; r <= 4; ++r) {
      const MechTemplate t = extract_template(m, r, roles);
      REQUIRE(t.species.size() == prev.size());
      for (std::size_t k = 0; k < t.species.size(); ++k) {
        std::set<int> cur(t.species[k].atoms.begin(), t.species[k].atoms.end());
        CHECK(std::includes(cur.begin(), cur.end(), prev[k].begin(), prev[k].end()));
        prev[k] = std::move(cur);
      }
    }
    const MechTemplate inf = extract_template(m, MechTemplate::kInfinite, roles);
    std::size_t k = 0;
    for (const SpeciesRole &r: roles) {
      if (r.role == Role::kSpectator)
        continue;
      CHECK(inf.species[k].atoms.size() == r.maps.size());
      ++k;
    }
  }
}
