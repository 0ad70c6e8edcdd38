//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "mech/smiles.h"

namespace mech {
namespace {

// Leaves explored by the tie-breaking search before it falls back to
// taking the first candidate at every remaining level.
constexpr int kLeafBudget = 64;

using Ranks = std::vector<int>;

template <class Key>
Ranks dense_ranks(const std::vector<Key> &keys) {
  std::vector<int> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return keys[x] < keys[y]; });
  Ranks r(keys.size());
  int rank = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && keys[order[k - 1]] < keys[order[k]])
      rank = static_cast<int>(k);
    r[order[k]] = rank;
  }
  return r;
}

int count_classes(const Ranks &r) {
  std::vector<int> s(r);
  std::sort(s.begin(), s.end());
  return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
}

// Iterated neighbourhood refinement; ranks keep their relative order.
void refine(const MolGraph &g, Ranks &ranks) {
  int classes = count_classes(ranks);
  while (classes < g.num_atoms()) {
    std::vector<std::pair<int, std::vector<int>>> keys(g.num_atoms());
    for (int i = 0; i < g.num_atoms(); ++i) {
      keys[i].first = ranks[i];
      for (const Neighbor &n: g.neighbors(i))
        keys[i].second.push_back(ranks[n.atom] * 4 + g.bond(n.bond).order);
      std::sort(keys[i].second.begin(), keys[i].second.end());
    }
    Ranks next = dense_ranks(keys);
    const int next_classes = count_classes(next);
    ranks = std::move(next);
    if (next_classes == classes)
      break;
    classes = next_classes;
  }
}

Ranks initial_ranks(const MolGraph &g, bool use_maps) {
  using Key = std::tuple<int, int, int, int, int, int>;
  std::vector<Key> keys(g.num_atoms());
  for (int i = 0; i < g.num_atoms(); ++i) {
    const Atom &a = g.atom(i);
    keys[i] = { g.degree(i), a.element, a.isotope, a.charge, a.hcount, 0 };
  }
  Ranks r = dense_ranks(keys);
  refine(g, r);
  if (use_maps) {
    std::vector<std::pair<int, int>> mk(g.num_atoms());
    for (int i = 0; i < g.num_atoms(); ++i)
      mk[i] = { r[i], g.atom(i).map };
    r = dense_ranks(mk);
    refine(g, r);
  }
  return r;
}

class ComponentWriter {
public:
  ComponentWriter(const MolGraph &g, const Ranks &ranks,
                  const WriteOptions &opts)
      : g_(g), ranks_(ranks), opts_(opts), visited_(g.num_atoms(), 0),
        bond_used_(g.num_bonds(), 0), children_(g.num_atoms()),
        ring_open_(g.num_atoms()), ring_close_(g.num_atoms()),
        digit_of_bond_(g.num_bonds(), -1) { }

  std::string write() {
    int start = 0;
    for (int i = 1; i < g_.num_atoms(); ++i)
      if (ranks_[i] < ranks_[start])
        start = i;
    plan(start, -1);
    emit(start, -1);
    return std::move(out_);
  }

private:
  std::vector<Neighbor> sorted_neighbors(int u) const {
    std::vector<Neighbor> ns(g_.neighbors(u).begin(), g_.neighbors(u).end());
    std::sort(ns.begin(), ns.end(), [&](const Neighbor &x, const Neighbor &y) {
      return ranks_[x.atom] < ranks_[y.atom];
    });
    return ns;
  }

  void plan(int u, int parent_bond) {
    visited_[u] = 1;
    for (const Neighbor &n: sorted_neighbors(u)) {
      if (n.bond == parent_bond || bond_used_[n.bond])
        continue;
      bond_used_[n.bond] = 1;
      if (visited_[n.atom]) {
        ring_open_[n.atom].push_back(n);
        ring_close_[u].push_back({ n.atom, n.bond });
      } else {
        children_[u].push_back(n);
        plan(n.atom, n.bond);
      }
    }
  }

  void emit_bond(int from, int bond) {
    const Bond &b = g_.bond(bond);
    if (b.order == 2) {
      out_ += '=';
    } else if (b.order == 3) {
      out_ += '#';
    } else if (b.order > 3) {
      out_ += '$';
    } else if (opts_.stereo && b.direction != 0) {
      char d = b.direction;
      if (from != b.a)
        d = d == '/' ? '\\' : '/';
      out_ += d;
    }
  }

  void emit_digit(int d) {
    if (d < 10) {
      out_ += static_cast<char>('0' + d);
    } else {
      out_ += '%';
      out_ += std::to_string(d);
    }
  }

  void emit_atom(int u) {
    const Atom &a = g_.atom(u);
    const int map = a.map;
    const bool plain = !opts_.bracket_all && in_organic_subset(a.element)
                       && a.charge == 0 && a.isotope == 0 && map == 0
                       && (a.chirality.empty() || !opts_.stereo)
                       && a.hcount
                              == default_implicit_hydrogens(
                                  a.element, g_.valence(u) - a.hcount);
    const std::string_view sym = element(a.element).symbol;
    if (plain) {
      out_ += sym;
      return;
    }
    out_ += '[';
    if (a.isotope != 0)
      out_ += std::to_string(a.isotope);
    out_ += sym;
    if (opts_.stereo)
      out_ += a.chirality;
    if (a.hcount > 0) {
      out_ += 'H';
      if (a.hcount > 1)
        out_ += std::to_string(a.hcount);
    }
    if (a.charge != 0) {
      out_ += a.charge > 0 ? '+' : '-';
      if (std::abs(a.charge) > 1)
        out_ += std::to_string(std::abs(a.charge));
    }
    if (map != 0) {
      out_ += ':';
      out_ += std::to_string(map);
    }
    out_ += ']';
  }

  int take_digit() {
    int d = 1;
    while (std::find(digits_.begin(), digits_.end(), d) != digits_.end())
      ++d;
    digits_.push_back(d);
    return d;
  }

  void emit(int u, int parent_bond) {
    if (parent_bond >= 0)
      emit_bond(g_.bond(parent_bond).other(u), parent_bond);
    emit_atom(u);

    auto closes = ring_close_[u];
    std::sort(closes.begin(), closes.end(),
              [&](const Neighbor &x, const Neighbor &y) {
                return digit_of_bond_[x.bond] < digit_of_bond_[y.bond];
              });
    for (const Neighbor &n: closes) {
      const int d = digit_of_bond_[n.bond];
      emit_digit(d);
      digits_.erase(std::find(digits_.begin(), digits_.end(), d));
    }
    for (const Neighbor &n: ring_open_[u]) {
      const int d = take_digit();
      digit_of_bond_[n.bond] = d;
      emit_bond(u, n.bond);
      emit_digit(d);
    }

    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch)
        out_ += '(';
      emit(kids[k].atom, kids[k].bond);
      if (branch)
        out_ += ')';
    }
  }

  const MolGraph &g_;
  const Ranks &ranks_;
  const WriteOptions &opts_;
  std::vector<char> visited_, bond_used_;
  std::vector<std::vector<Neighbor>> children_, ring_open_, ring_close_;
  std::vector<int> digit_of_bond_;
  std::vector<int> digits_;
  std::string out_;
};

class CanonicalSearch {
public:
  CanonicalSearch(const MolGraph &g, const WriteOptions &opts)
      : g_(g), opts_(opts) { }

  std::string run(Ranks ranks) {
    search(std::move(ranks));
    return best_;
  }

private:
  void search(Ranks ranks) {
    // Smallest rank shared by more than one atom.
    std::map<int, std::vector<int>> classes;
    for (int i = 0; i < g_.num_atoms(); ++i)
      classes[ranks[i]].push_back(i);
    const std::vector<int> *tied = nullptr;
    for (const auto &[r, members]: classes) {
      if (members.size() > 1) {
        tied = &members;
        break;
      }
    }
    if (tied == nullptr) {
      ++leaves_;
      std::string s = ComponentWriter(g_, ranks, opts_).write();
      if (!have_best_ || s < best_) {
        best_ = std::move(s);
        have_best_ = true;
      }
      return;
    }
    const std::vector<int> members = *tied;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k > 0 && leaves_ >= kLeafBudget)
        break;
      Ranks next(ranks);
      for (int i = 0; i < g_.num_atoms(); ++i)
        next[i] = ranks[i] * 2 + ((ranks[i] == ranks[members[0]]
                                   && i != members[k])
                                      ? 1
                                      : 0);
      next = dense_ranks(next);
      refine(g_, next);
      search(std::move(next));
    }
  }

  const MolGraph &g_;
  const WriteOptions &opts_;
  std::string best_;
  bool have_best_ = false;
  int leaves_ = 0;
};

} // namespace

std::string write_smiles(const MolGraph &g, const WriteOptions &opts) {
  MolGraph view = g;
  for (int i = 0; i < view.num_atoms(); ++i) {
    const int m = view.atom(i).map;
    if (m == 0)
      continue;
    if (opts.maps == MapMode::kNone
        || (opts.maps == MapMode::kMinimal && opts.keep_maps.count(m) == 0))
      view.set_map(i, 0);
  }
  view = fold_hydrogens(view, true);
  if (!opts.stereo) {
    // Stereo-only differences must not change the key.
    MolGraph plain;
    for (Atom a: view.atoms()) {
      a.chirality.clear();
      plain.add_atom(a);
    }
    for (const Bond &b: view.bonds())
      plain.add_bond(b.a, b.b, b.order);
    view = std::move(plain);
  }

  std::vector<std::string> parts;
  for (const auto &comp: components(view)) {
    const MolGraph sub = subgraph(view, comp);
    const bool use_maps = opts.maps != MapMode::kNone;
    parts.push_back(CanonicalSearch(sub, opts).run(initial_ranks(sub, use_maps)));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0)
      out += '.';
    out += parts[k];
  }
  return out;
}

std::string canonical_form(const MolGraph &g) {
  WriteOptions opts;
  opts.maps = MapMode::kNone;
  opts.stereo = false;
  return write_smiles(g, opts);
}

} // namespace mech
