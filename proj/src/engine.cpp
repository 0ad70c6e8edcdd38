//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/engine.h"

#include <algorithm>
#include <map>

namespace mech {

const char *to_string(ApplyErrorKind kind) {
  switch (kind) {
  case ApplyErrorKind::kMissingMap:
    return "missing-map";
  case ApplyErrorKind::kNoLonePair:
    return "no-lone-pair";
  case ApplyErrorKind::kMissingBond:
    return "missing-bond";
  case ApplyErrorKind::kNegativeBondOrder:
    return "negative-bond-order";
  case ApplyErrorKind::kUnstable:
    return "unstable-product";
  }
  return "apply-error";
}

namespace {

std::string describe(const std::vector<Violation> &vs) {
  std::string out;
  for (const Violation &v: vs) {
    if (!out.empty())
      out += "; ";
    out += "atom " + (v.map != 0 ? ":" + std::to_string(v.map)
                                 : "#" + std::to_string(v.atom))
           + " " + v.message;
  }
  return out;
}

} // namespace

State::State(MolGraph g): graph_(std::move(g)) {
  canonical_ = canonical_form(graph_);
}

State State::from_graph(const MolGraph &g, bool check,
                        const ValenceTable &table) {
  MolGraph full = with_explicit_hydrogens(g);
  int next = full.max_map();
  for (int i = 0; i < full.num_atoms(); ++i)
    if (full.atom(i).map == 0)
      full.set_map(i, ++next);
  if (check) {
    auto report = validate(full, table);
    if (!report.stable()) {
      const std::string msg = "unstable state: " + describe(report.violations);
      throw ApplyError(ApplyErrorKind::kUnstable, std::nullopt,
                       std::move(report.violations), msg);
    }
  }
  return State(std::move(full));
}

State State::parse(std::string_view smiles, bool check) {
  return from_graph(parse_smiles(smiles), check);
}

std::vector<std::string> State::species() const {
  std::vector<std::string> out;
  for (const auto &comp: components(graph_))
    out.push_back(canonical_form(subgraph(graph_, comp)));
  std::sort(out.begin(), out.end());
  return out;
}

MolGraph apply_arrows(const MolGraph &g, std::span<const Arrow> arrows) {
  std::map<std::pair<int, int>, int> bond_delta;
  std::map<int, int> charge_delta;
  auto index = [&](const Arrow &x, int m) {
    const int i = g.find_map(m);
    if (i < 0)
      throw ApplyError(ApplyErrorKind::kMissingMap, x, {},
                       "arrow " + x.to_string() + " references missing map "
                           + std::to_string(m));
    return i;
  };
  auto need_bond = [&](const Arrow &x, int i, int j) {
    if (g.find_bond(i, j) < 0)
      throw ApplyError(ApplyErrorKind::kMissingBond, x, {},
                       "arrow " + x.to_string() + " needs a bond between :"
                           + std::to_string(x.a) + " and :"
                           + std::to_string(x.b));
  };
  auto key = [](int i, int j) { return std::pair<int, int>(std::min(i, j), std::max(i, j)); };

  for (const Arrow &x: arrows) {
    const int a = index(x, x.a), b = index(x, x.b);
    switch (x.kind) {
    case ArrowKind::kAttack:
      if (nonbonding_electrons(g, a) < 2)
        throw ApplyError(ApplyErrorKind::kNoLonePair, x, {},
                         "arrow " + x.to_string() + ": atom :"
                             + std::to_string(x.a) + " has no lone pair");
      bond_delta[key(a, b)] += 1;
      charge_delta[a] += 1;
      charge_delta[b] -= 1;
      break;
    case ArrowKind::kIonize:
      need_bond(x, a, b);
      bond_delta[key(a, b)] -= 1;
      charge_delta[a] += 1;
      charge_delta[b] -= 1;
      break;
    case ArrowKind::kBondAttack: {
      const int c = index(x, x.c);
      need_bond(x, a, b);
      bond_delta[key(a, b)] -= 1;
      bond_delta[key(b, c)] += 1;
      charge_delta[a] += 1;
      charge_delta[c] -= 1;
      break;
    }
    }
  }

  MolGraph out = g;
  for (const auto &[i, dq]: charge_delta)
    out.set_charge(i, out.atom(i).charge + dq);
  for (const auto &[ij, d]: bond_delta) {
    if (d == 0)
      continue;
    const int order = g.bond_order(ij.first, ij.second) + d;
    const int mi = g.atom(ij.first).map, mj = g.atom(ij.second).map;
    if (order < 0)
      throw ApplyError(ApplyErrorKind::kNegativeBondOrder, std::nullopt, {},
                       "arrows drive the bond :" + std::to_string(mi) + "-:"
                           + std::to_string(mj) + " below zero");
    if (order > 3) {
      Violation v { ij.first, mi, ViolationKind::kBondOrder,
                    "bond order " + std::to_string(order) + " exceeds 3" };
      throw ApplyError(ApplyErrorKind::kUnstable, std::nullopt, { v },
                       "unstable product: " + describe({ v }));
    }
    out.set_bond_order(ij.first, ij.second, order);
  }
  return out;
}

State apply_move(const State &s, std::span<const Arrow> arrows,
                 const ValenceTable &table) {
  MolGraph out = apply_arrows(s.graph(), arrows);
  auto report = validate(out, table);
  if (!report.stable()) {
    const std::string msg = "unstable product: " + describe(report.violations);
    throw ApplyError(ApplyErrorKind::kUnstable, std::nullopt,
                     std::move(report.violations), msg);
  }
  return State::from_graph(out, false);
}

std::vector<Arrow> resolve_step(const State &s, const MechStep &step) {
  const MolGraph host = with_explicit_hydrogens(step.host);
  const MolGraph &target = s.graph();
  const auto host_comps = components(host);
  const auto state_comps = components(target);

  std::vector<std::string> state_keys;
  std::vector<MolGraph> state_graphs;
  for (const auto &c: state_comps) {
    state_graphs.push_back(subgraph(target, c));
    state_keys.push_back(canonical_form(state_graphs.back()));
  }

  std::map<int, int> host_map_to_state;
  std::vector<char> taken(state_comps.size(), 0);
  for (const auto &hc: host_comps) {
    const MolGraph part = subgraph(host, hc);
    const std::string key = canonical_form(part);
    // Components sharing a map number with the host component go first.
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < state_comps.size(); ++k)
      if (!taken[k] && state_keys[k] == key)
        order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      auto shares = [&](std::size_t k) {
        for (int i = 0; i < part.num_atoms(); ++i) {
          const int m = part.atom(i).map;
          if (m != 0 && state_graphs[k].find_map(m) >= 0)
            return true;
        }
        return false;
      };
      return shares(x) && !shares(y);
    });
    bool placed = false;
    for (std::size_t k: order) {
      auto f = find_isomorphism(part, state_graphs[k]);
      if (!f)
        continue;
      for (int i = 0; i < part.num_atoms(); ++i)
        if (part.atom(i).map != 0)
          host_map_to_state[part.atom(i).map] =
              state_graphs[k].atom((*f)[i]).map;
      taken[k] = 1;
      placed = true;
      break;
    }
    if (!placed)
      throw Error("step host component " + write_smiles(part, MapMode::kNone)
                  + " is not present in the state");
  }

  std::vector<Arrow> out;
  auto tr = [&](int m) {
    auto it = host_map_to_state.find(m);
    if (it == host_map_to_state.end())
      throw Error("arrow references map " + std::to_string(m)
                  + " which is not in the step host");
    return it->second;
  };
  for (const Arrow &x: step.arrows) {
    Arrow y = x;
    y.a = tr(x.a);
    y.b = tr(x.b);
    if (x.kind == ArrowKind::kBondAttack)
      y.c = tr(x.c);
    out.push_back(y);
  }
  return out;
}

State apply_step(const State &s, const MechStep &step,
                 const ValenceTable &table) {
  return apply_move(s, resolve_step(s, step), table);
}

MechStep make_step(const State &s, std::vector<Arrow> arrows) {
  return { s.graph(), std::move(arrows) };
}

} // namespace mech
