//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mech/molgraph.h"

namespace mech {

enum class ViolationKind {
  kOverValence,
  kUnusualValence,
  kNegativeNonbonding,
  kOddElectrons,
  kIncompleteShell,
  kExpandedShell,
  kBondOrder,
};

const char *to_string(ViolationKind kind);

struct Violation {
  int atom;
  int map;
  ViolationKind kind;
  std::string message;
};

struct StabilityReport {
  std::vector<Violation> violations;

  bool stable() const noexcept { return violations.empty(); }
};

// Closed-shell compliance rules.
//
// Every atom must have a non-negative, even count of nonbonding electrons
// N = V - charge - B (B includes folded hydrogens). Main-group atoms must
// additionally use one of the allowed bond-order totals for their
// (element, charge) pair; by default these follow the isoelectronic neutral
// element, e.g. N+ behaves like C and O- like F. Period 1-2 atoms must fill
// their shell exactly, except that sextet elements (B, C, Al) may sit at six
// electrons when they carry no lone pair. d/f-block atoms only take part in
// charge bookkeeping.
class ValenceTable {
public:
  ValenceTable();

  static const ValenceTable &defaults();

  // Throws UnknownElementError for elements without valence data.
  std::vector<int> allowed(int element, int charge) const;
  int max_valence(int element, int charge) const;

  void set_allowed(int element, int charge, std::vector<int> totals);
  void set_sextet(int element, bool allow);
  void set_exempt(int element, bool exempt);

  bool exempt(int element) const;

  std::optional<ViolationKind> check(int element, int charge,
                                     int valence) const;

private:
  std::map<std::pair<int, int>, std::vector<int>> overrides_;
  std::set<int> sextet_;
  std::set<int> exempt_add_;
  std::set<int> exempt_remove_;
};

StabilityReport validate(const MolGraph &g,
                         const ValenceTable &table = ValenceTable::defaults());

inline bool is_stable(const MolGraph &g,
                      const ValenceTable &table = ValenceTable::defaults()) {
  return validate(g, table).stable();
}

// Nonbonding electron count of atom i (may be negative).
int nonbonding_electrons(const MolGraph &g, int i);

} // namespace mech
