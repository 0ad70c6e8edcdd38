//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mech/element.h"

namespace mech {

struct Atom {
  int element = 0;
  int charge = 0;
  int map = 0; // 0 = unmapped
  // Hydrogens folded into this atom rather than stored as separate atoms.
  int hcount = 0;
  int isotope = 0;
  // Set on hydrogens that are stored as atoms of their own.
  bool explicit_h = false;
  // Stereo annotation kept verbatim ("@", "@@", ...); carries no semantics.
  std::string chirality;

  bool is_hydrogen() const noexcept { return element == kHydrogen; }
};

struct Bond {
  int a;
  int b;
  int order;
  // '/' or '\' as written from a towards b, 0 when absent.
  char direction = 0;

  int other(int i) const noexcept { return i == a ? b : a; }
};

struct Neighbor {
  int atom;
  int bond;
};

// Molecular graph with integer bond orders. Atom and bond indices are dense
// and stable for the lifetime of the value; map numbers are unique when set.
class MolGraph {
public:
  MolGraph() = default;

  int add_atom(const Atom &atom);
  // Throws on self-loops, duplicate bonds or orders outside 1..3.
  int add_bond(int a, int b, int order, char direction = 0);

  int num_atoms() const noexcept { return static_cast<int>(atoms_.size()); }
  int num_bonds() const noexcept { return static_cast<int>(bonds_.size()); }
  bool empty() const noexcept { return atoms_.empty(); }

  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }
  std::span<const Neighbor> neighbors(int i) const { return adj_[i]; }

  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  // Sum of bond orders including folded hydrogens.
  int valence(int i) const;
  int total_hydrogens(int i) const;

  int find_bond(int a, int b) const;
  int bond_order(int a, int b) const;
  // Index of the atom carrying map number m, or -1.
  int find_map(int m) const;
  int max_map() const;

  void set_charge(int i, int charge) { atoms_[i].charge = charge; }
  void set_hcount(int i, int h) { atoms_[i].hcount = h; }
  void set_map(int i, int m);
  void clear_maps();
  // Order 0 removes the bond; indices of later bonds shift down.
  void set_bond_order(int a, int b, int order);

  bool operator==(const MolGraph &other) const;

private:
  void rebuild_adjacency();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
  std::unordered_map<int, int> map_index_;
};

// Connected components as sorted atom index lists, ordered by first atom.
std::vector<std::vector<int>> components(const MolGraph &g);

// Atoms keep the order given in `atoms`.
MolGraph subgraph(const MolGraph &g, std::span<const int> atoms);

MolGraph disjoint_union(std::span<const MolGraph> parts);

// Every folded hydrogen becomes an explicit, unmapped atom.
MolGraph with_explicit_hydrogens(const MolGraph &g);

// Folds plain hydrogens (neutral, isotope-free, singly bonded to a heavy
// atom) back into their neighbour. Mapped hydrogens survive when keep_mapped.
MolGraph fold_hydrogens(const MolGraph &g, bool keep_mapped);

struct Formula {
  // Keyed by atomic number; counts include folded hydrogens.
  std::map<int, int> counts;
  int charge = 0;

  Formula &operator+=(const Formula &other);
  bool operator==(const Formula &other) const = default;
  // True if every element count of *this is <= the one in `other`.
  bool contained_in(const Formula &other) const;
  std::string to_string() const;
};

Formula formula_multiset(const MolGraph &g);

// Map-free, isomorphism-invariant key; equals the canonical SMILES.
std::string canonical_form(const MolGraph &g);

} // namespace mech

namespace mech {

// Atom correspondence f with x.atom(i) ~ y.atom(f[i]) when x and y are
// isomorphic (element, charge, isotope, folded hydrogens and bond orders
// agree). Atoms whose map number also occurs in y are tried against that
// atom first, so identical numberings map onto themselves.
std::optional<std::vector<int>> find_isomorphism(const MolGraph &x,
                                                 const MolGraph &y);

} // namespace mech
