//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mech/molgraph.h"

namespace mech {

enum class ArrowKind {
  kAttack,     // lone pair of a forms a bond to b
  kIonize,     // bond (a, b) collapses onto b
  kBondAttack, // bond (a, b) moves to (b, c)
};

// One electron-pair move between atom-map numbers. Ordering is by
// (kind, a, b, c).
struct Arrow {
  ArrowKind kind = ArrowKind::kAttack;
  int a = 0;
  int b = 0;
  int c = 0; // BondAttack only

  static Arrow attack(int a, int b) { return { ArrowKind::kAttack, a, b, 0 }; }
  static Arrow ionize(int a, int b) { return { ArrowKind::kIonize, a, b, 0 }; }
  static Arrow bond_attack(int a, int b, int c) {
    return { ArrowKind::kBondAttack, a, b, c };
  }

  // Atom that receives the electron pair.
  int sink() const noexcept { return kind == ArrowKind::kBondAttack ? c : b; }

  auto operator<=>(const Arrow &) const = default;

  std::string to_string() const;
};

std::string format_arrows(std::span<const Arrow> arrows);

// Parses the arrow list that follows '|'. `base` is added to reported
// offsets.
std::vector<Arrow> parse_arrows(std::string_view s, std::size_t base = 0);

std::set<int> referenced_maps(std::span<const Arrow> arrows);

enum class Scope { kMinimal, kEquilibrated };

struct MechStep {
  MolGraph host;
  // Applied as one atomic set; the order is notation only.
  std::vector<Arrow> arrows;

  // True when every host component holds an arrow-referenced atom.
  bool is_minimal() const;
};

// `SMILES|arrows`. Throws ParseError (missing separator, malformed arrow,
// dangling map reference, or any SMILES error) with the byte offset.
MechStep parse_mechsmiles(std::string_view s);

// Minimal scope keeps only components touched by an arrow. Maps are written
// on arrow-referenced atoms only, so unreferenced hydrogens fold away.
std::string serialize(const MechStep &step, Scope scope = Scope::kMinimal);

// Host restricted to the components touched by the arrows.
MolGraph minimal_host(const MolGraph &host, std::span<const Arrow> arrows);

struct LengthStats {
  std::size_t count = 0;
  double mean = 0;
  double stddev = 0; // population
};

LengthStats length_stats(std::span<const std::size_t> lengths);

struct CharStats {
  LengthStats minimal;
  LengthStats equilibrated;
  std::optional<LengthStats> source;
};

// Throws Error on an empty corpus. `sources`, when non-empty, must be
// parallel to `steps`.
CharStats char_stats(std::span<const MechStep> steps,
                     std::span<const std::string> sources = {});

} // namespace mech
