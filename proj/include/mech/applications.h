//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mech/convert.h"

namespace mech {

// Initial-state atom -> final-state atom, by map number. Every atom,
// hydrogens included, appears exactly once.
struct AtomMap {
  std::vector<std::pair<int, int>> pairs;
  // Reactants >> final state, every atom mapped.
  std::string mapped_reaction;

  int image(int initial_map) const;
};

// Replays the steps (throws Error on failure) and composes the per-step
// correspondences, which are the identity on map numbers.
AtomMap derive_atom_map(const Mechanism &m);

enum class Role {
  kProductContributor,
  kByproductContributor,
  kCatalyst,
  kSpectator,
};

const char *to_string(Role r);

struct SpeciesRole {
  std::string smiles;    // map-free canonical
  std::vector<int> maps; // atoms of the species in the initial state
  Role role = Role::kSpectator;
};

// Initial-state map numbers referenced by any arrow of the mechanism.
std::set<int> referenced_atoms(const Mechanism &m);

// One entry per initial component, in component order.
std::vector<SpeciesRole> classify_roles(const Mechanism &m);

struct TemplateSpecies {
  Role role = Role::kSpectator;
  std::vector<int> atoms;   // map numbers kept in the pattern
  std::vector<int> anchors; // arrow-touched map numbers
  std::string pattern;
};

struct MechTemplate {
  static constexpr int kInfinite = -1;

  int radius = kInfinite;
  std::vector<TemplateSpecies> species;
  // Arrows per step, in initial-state numbering.
  std::vector<std::string> steps;

  // "{role}pattern" joined with '.', followed by '|' and the steps joined
  // by ' >> '.
  std::string to_string() const;
  nlohmann::json to_json() const;
};

// Atoms within `radius` bonds of an arrow-touched atom of each non-spectator
// species (the whole species for kInfinite).
MechTemplate extract_template(const Mechanism &m, int radius);
MechTemplate extract_template(const Mechanism &m, int radius,
                              const std::vector<SpeciesRole> &roles);

} // namespace mech
