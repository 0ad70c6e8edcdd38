//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/molgraph.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mech/error.h"

namespace mech {

int MolGraph::add_atom(const Atom &atom) {
  const int idx = num_atoms();
  if (atom.map != 0) {
    if (!map_index_.emplace(atom.map, idx).second)
      throw Error("duplicate map number " + std::to_string(atom.map));
  }
  atoms_.push_back(atom);
  adj_.emplace_back();
  return idx;
}

int MolGraph::add_bond(int a, int b, int order, char direction) {
  if (a == b)
    throw Error("bond endpoints must differ");
  if (a < 0 || b < 0 || a >= num_atoms() || b >= num_atoms())
    throw Error("bond endpoint out of range");
  if (order < 1 || order > 3)
    throw Error("bond order must be 1..3, got " + std::to_string(order));
  if (find_bond(a, b) >= 0)
    throw Error("duplicate bond");

  const int idx = num_bonds();
  bonds_.push_back({ a, b, order, direction });
  adj_[a].push_back({ b, idx });
  adj_[b].push_back({ a, idx });
  return idx;
}

int MolGraph::valence(int i) const {
  int v = atoms_[i].hcount;
  for (const Neighbor &n: adj_[i])
    v += bonds_[n.bond].order;
  return v;
}

int MolGraph::total_hydrogens(int i) const {
  int h = atoms_[i].hcount;
  for (const Neighbor &n: adj_[i])
    h += atoms_[n.atom].is_hydrogen() ? 1 : 0;
  return h;
}

int MolGraph::find_bond(int a, int b) const {
  if (adj_[a].size() > adj_[b].size())
    std::swap(a, b);
  for (const Neighbor &n: adj_[a])
    if (n.atom == b)
      return n.bond;
  return -1;
}

int MolGraph::bond_order(int a, int b) const {
  const int idx = find_bond(a, b);
  return idx < 0 ? 0 : bonds_[idx].order;
}

int MolGraph::find_map(int m) const {
  auto it = map_index_.find(m);
  return it == map_index_.end() ? -1 : it->second;
}

int MolGraph::max_map() const {
  int m = 0;
  for (const Atom &a: atoms_)
    m = std::max(m, a.map);
  return m;
}

void MolGraph::set_map(int i, int m) {
  if (atoms_[i].map == m)
    return;
  if (m != 0 && map_index_.count(m) > 0)
    throw Error("duplicate map number " + std::to_string(m));
  if (atoms_[i].map != 0)
    map_index_.erase(atoms_[i].map);
  atoms_[i].map = m;
  if (m != 0)
    map_index_.emplace(m, i);
}

void MolGraph::clear_maps() {
  for (Atom &a: atoms_)
    a.map = 0;
  map_index_.clear();
}

void MolGraph::set_bond_order(int a, int b, int order) {
  const int idx = find_bond(a, b);
  if (idx < 0) {
    if (order > 0) {
      bonds_.push_back({ a, b, order, 0 });
      adj_[a].push_back({ b, num_bonds() - 1 });
      adj_[b].push_back({ a, num_bonds() - 1 });
    }
    return;
  }
  if (order > 0) {
    bonds_[idx].order = order;
    return;
  }
  bonds_.erase(bonds_.begin() + idx);
  rebuild_adjacency();
}

void MolGraph::rebuild_adjacency() {
  for (auto &l: adj_)
    l.clear();
  for (int i = 0; i < num_bonds(); ++i) {
    adj_[bonds_[i].a].push_back({ bonds_[i].b, i });
    adj_[bonds_[i].b].push_back({ bonds_[i].a, i });
  }
}

bool MolGraph::operator==(const MolGraph &other) const {
  if (num_atoms() != other.num_atoms() || num_bonds() != other.num_bonds())
    return false;
  for (int i = 0; i < num_atoms(); ++i) {
    const Atom &x = atoms_[i], &y = other.atoms_[i];
    if (x.element != y.element || x.charge != y.charge || x.map != y.map
        || x.hcount != y.hcount || x.isotope != y.isotope)
      return false;
  }
  for (const Bond &b: bonds_)
    if (other.bond_order(b.a, b.b) != b.order)
      return false;
  return true;
}

std::vector<std::vector<int>> components(const MolGraph &g) {
  std::vector<int> comp(g.num_atoms(), -1);
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  for (int s = 0; s < g.num_atoms(); ++s) {
    if (comp[s] >= 0)
      continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out[id].push_back(u);
      for (const Neighbor &n: g.neighbors(u)) {
        if (comp[n.atom] < 0) {
          comp[n.atom] = id;
          stack.push_back(n.atom);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

MolGraph subgraph(const MolGraph &g, std::span<const int> atoms) {
  MolGraph sub;
  std::vector<int> remap(g.num_atoms(), -1);
  for (int i: atoms)
    remap[i] = sub.add_atom(g.atom(i));
  for (const Bond &b: g.bonds())
    if (remap[b.a] >= 0 && remap[b.b] >= 0)
      sub.add_bond(remap[b.a], remap[b.b], b.order, b.direction);
  return sub;
}

MolGraph disjoint_union(std::span<const MolGraph> parts) {
  MolGraph out;
  for (const MolGraph &p: parts) {
    const int base = out.num_atoms();
    for (const Atom &a: p.atoms())
      out.add_atom(a);
    for (const Bond &b: p.bonds())
      out.add_bond(base + b.a, base + b.b, b.order, b.direction);
  }
  return out;
}

MolGraph with_explicit_hydrogens(const MolGraph &g) {
  MolGraph out;
  for (Atom a: g.atoms()) {
    a.hcount = 0;
    if (a.is_hydrogen())
      a.explicit_h = true;
    out.add_atom(a);
  }
  for (const Bond &b: g.bonds())
    out.add_bond(b.a, b.b, b.order, b.direction);
  for (int i = 0; i < g.num_atoms(); ++i) {
    for (int k = 0; k < g.atom(i).hcount; ++k) {
      Atom h;
      h.element = kHydrogen;
      h.explicit_h = true;
      out.add_bond(i, out.add_atom(h), 1);
    }
  }
  return out;
}

namespace {

bool foldable(const MolGraph &g, int i, bool keep_mapped) {
  const Atom &a = g.atom(i);
  if (!a.is_hydrogen() || a.charge != 0 || a.isotope != 0 || a.hcount != 0
      || !a.chirality.empty())
    return false;
  if (keep_mapped && a.map != 0)
    return false;
  if (g.degree(i) != 1)
    return false;
  const Neighbor &n = g.neighbors(i)[0];
  return g.bond(n.bond).order == 1 && !g.atom(n.atom).is_hydrogen()
         && g.bond(n.bond).direction == 0;
}

} // namespace

MolGraph fold_hydrogens(const MolGraph &g, bool keep_mapped) {
  std::vector<int> kept;
  std::vector<int> extra(g.num_atoms(), 0);
  for (int i = 0; i < g.num_atoms(); ++i) {
    if (foldable(g, i, keep_mapped))
      ++extra[g.neighbors(i)[0].atom];
    else
      kept.push_back(i);
  }
  if (static_cast<int>(kept.size()) == g.num_atoms())
    return g;

  MolGraph out;
  std::vector<int> remap(g.num_atoms(), -1);
  for (int i: kept) {
    Atom a = g.atom(i);
    a.hcount += extra[i];
    if (!keep_mapped)
      a.map = 0;
    remap[i] = out.add_atom(a);
  }
  for (const Bond &b: g.bonds())
    if (remap[b.a] >= 0 && remap[b.b] >= 0)
      out.add_bond(remap[b.a], remap[b.b], b.order, b.direction);
  return out;
}

Formula &Formula::operator+=(const Formula &other) {
  for (auto [z, n]: other.counts)
    counts[z] += n;
  charge += other.charge;
  return *this;
}

bool Formula::contained_in(const Formula &other) const {
  for (auto [z, n]: counts) {
    auto it = other.counts.find(z);
    if (it == other.counts.end() || it->second < n)
      return false;
  }
  return true;
}

std::string Formula::to_string() const {
  // Hill order: C, H, then alphabetical.
  std::vector<std::pair<std::string_view, int>> items;
  for (auto [z, n]: counts)
    items.emplace_back(element(z).symbol, n);
  const bool has_c = counts.count(kCarbon) > 0;
  auto rank = [&](std::string_view s) {
    if (has_c && s == "C")
      return 0;
    if (has_c && s == "H")
      return 1;
    return 2;
  };
  std::sort(items.begin(), items.end(), [&](const auto &x, const auto &y) {
    return std::make_pair(rank(x.first), x.first)
           < std::make_pair(rank(y.first), y.first);
  });
  std::ostringstream os;
  for (auto [s, n]: items) {
    os << s;
    if (n != 1)
      os << n;
  }
  if (charge != 0)
    os << (charge > 0 ? "+" : "") << charge;
  return os.str();
}

Formula formula_multiset(const MolGraph &g) {
  Formula f;
  for (const Atom &a: g.atoms()) {
    ++f.counts[a.element];
    if (a.hcount > 0)
      f.counts[kHydrogen] += a.hcount;
    f.charge += a.charge;
  }
  return f;
}

} // namespace mech
