//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mech/molgraph.h"

namespace mech {

enum class SmilesTokenKind {
  kOrganicAtom,
  kBracketAtom,
  kBond,
  kBranchOpen,
  kBranchClose,
  kRingClosure,
  kDot,
};

struct SmilesToken {
  SmilesTokenKind kind;
  std::string_view lexeme;
  std::size_t offset;
};

// Splits `s` into lexemes; concatenating them gives back `s`.
std::vector<SmilesToken> lex_smiles(std::string_view s);

// Parses dot-separated SMILES. Aromatic input is kekulized. Organic-subset
// atoms get their implicit hydrogens from the default valences; bracket
// hydrogen counts stay folded. Throws ParseError with the byte offset.
MolGraph parse_smiles(std::string_view s);

enum class MapMode {
  kAll,
  kMinimal, // only map numbers listed in WriteOptions::keep_maps
  kNone,
};

struct WriteOptions {
  MapMode maps = MapMode::kAll;
  std::set<int> keep_maps;
  bool stereo = true;
  // Every atom in brackets with its hydrogen count (template patterns).
  bool bracket_all = false;
};

// Canonical writer: atom order derives from isomorphism-invariant ranks, with
// map numbers as the final tie-breaker. Plain hydrogens whose map is not
// emitted are folded into their neighbour.
std::string write_smiles(const MolGraph &g, const WriteOptions &opts = {});

inline std::string write_smiles(const MolGraph &g, MapMode mode) {
  WriteOptions opts;
  opts.maps = mode;
  return write_smiles(g, opts);
}

// Hydrogens an organic-subset atom receives implicitly at this valence.
int default_implicit_hydrogens(int element, int valence);
bool in_organic_subset(int element);

} // namespace mech
