//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/valence.h"

#include <algorithm>

#include "mech/error.h"

namespace mech {

const char *to_string(ViolationKind kind) {
  switch (kind) {
  case ViolationKind::kOverValence:
    return "over-valence";
  case ViolationKind::kUnusualValence:
    return "unusual-valence";
  case ViolationKind::kNegativeNonbonding:
    return "negative-nonbonding-electrons";
  case ViolationKind::kOddElectrons:
    return "odd-electron-count";
  case ViolationKind::kIncompleteShell:
    return "incomplete-shell";
  case ViolationKind::kExpandedShell:
    return "expanded-shell";
  case ViolationKind::kBondOrder:
    return "bond-order-out-of-range";
  }
  return "unknown";
}

ValenceTable::ValenceTable(): sextet_ { kBoron, kCarbon, 13 } { }

const ValenceTable &ValenceTable::defaults() {
  static const ValenceTable table;
  return table;
}

namespace {

const Element &known_element(int z) {
  const Element *e = element_by_number(z);
  if (e == nullptr)
    throw UnknownElementError("#" + std::to_string(z));
  if (e->valence_electrons == 0)
    throw UnknownElementError(std::string(e->symbol));
  return *e;
}

std::vector<int> derived_allowed(const Element &e, int charge) {
  const int n = e.valence_electrons - charge;
  if (n < 0)
    return {};
  if (e.block == Block::kS && e.period > 1)
    return { n };
  if (e.period == 1)
    return n <= 1 ? std::vector<int> { n } : std::vector<int> { 2 - n };
  if (e.period == 2) {
    if (n <= 4)
      return { n };
    if (n <= 8)
      return { 8 - n };
    return {};
  }
  switch (n) {
  case 5:
    return { 3, 5 };
  case 6:
    return { 2, 4, 6 };
  case 7:
    return { 1 };
  case 8:
    return { 0 };
  default:
    return n < 5 ? std::vector<int> { n } : std::vector<int> {};
  }
}

} // namespace

bool ValenceTable::exempt(int z) const {
  if (exempt_add_.count(z) > 0)
    return true;
  if (exempt_remove_.count(z) > 0)
    return false;
  const Element &e = known_element(z);
  return e.block == Block::kD || e.block == Block::kF;
}

std::vector<int> ValenceTable::allowed(int z, int charge) const {
  const Element &e = known_element(z);
  auto it = overrides_.find({ z, charge });
  if (it != overrides_.end())
    return it->second;
  return derived_allowed(e, charge);
}

int ValenceTable::max_valence(int z, int charge) const {
  const auto totals = allowed(z, charge);
  return totals.empty() ? -1 : *std::max_element(totals.begin(), totals.end());
}

void ValenceTable::set_allowed(int z, int charge, std::vector<int> totals) {
  overrides_[{ z, charge }] = std::move(totals);
}

void ValenceTable::set_sextet(int z, bool allow) {
  if (allow)
    sextet_.insert(z);
  else
    sextet_.erase(z);
}

void ValenceTable::set_exempt(int z, bool ex) {
  (ex ? exempt_add_ : exempt_remove_).insert(z);
  (ex ? exempt_remove_ : exempt_add_).erase(z);
}

std::optional<ViolationKind> ValenceTable::check(int z, int charge,
                                                 int valence) const {
  const Element &e = known_element(z);
  const int nonbonding = e.valence_electrons - charge - valence;
  const bool ex = exempt(z);
  std::vector<int> totals;
  if (!ex) {
    totals = allowed(z, charge);
    if (totals.empty()
        || valence > *std::max_element(totals.begin(), totals.end()))
      return ViolationKind::kOverValence;
  }
  if (nonbonding < 0)
    return ViolationKind::kNegativeNonbonding;
  if (nonbonding % 2 != 0)
    return ViolationKind::kOddElectrons;
  if (ex)
    return std::nullopt;
  if (std::find(totals.begin(), totals.end(), valence) == totals.end())
    return ViolationKind::kUnusualValence;

  if (e.block == Block::kS && e.period > 1)
    return nonbonding == 0 ? std::nullopt
                           : std::optional(ViolationKind::kUnusualValence);

  if (e.period <= 2) {
    const int full = e.period == 1 ? 2 : 8;
    const int shell = nonbonding + 2 * valence;
    if (shell > full)
      return ViolationKind::kExpandedShell;
    if (shell < full
        && !(sextet_.count(z) > 0 && shell == 6 && nonbonding == 0))
      return ViolationKind::kIncompleteShell;
  }
  return std::nullopt;
}

int nonbonding_electrons(const MolGraph &g, int i) {
  const Atom &a = g.atom(i);
  return known_element(a.element).valence_electrons - a.charge - g.valence(i);
}

StabilityReport validate(const MolGraph &g, const ValenceTable &table) {
  StabilityReport report;
  for (const Bond &b: g.bonds()) {
    if (b.order > 3) {
      report.violations.push_back(
          { b.a, g.atom(b.a).map, ViolationKind::kBondOrder,
            "bond order " + std::to_string(b.order) + " exceeds 3" });
    }
  }
  for (int i = 0; i < g.num_atoms(); ++i) {
    const Atom &a = g.atom(i);
    const int v = g.valence(i);
    if (auto kind = table.check(a.element, a.charge, v)) {
      report.violations.push_back(
          { i, a.map, *kind,
            std::string(element(a.element).symbol) + " with charge "
                + std::to_string(a.charge) + " and valence "
                + std::to_string(v) + ": " + to_string(*kind) });
    }
  }
  return report;
}

} // namespace mech
