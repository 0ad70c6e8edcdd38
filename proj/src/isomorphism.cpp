//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <deque>

#include "mech/molgraph.h"

namespace mech {
namespace {

class Matcher {
public:
  Matcher(const MolGraph &x, const MolGraph &y)
      : x_(x), y_(y), f_(x.num_atoms(), -1), used_(y.num_atoms(), 0) { }

  std::optional<std::vector<int>> run() {
    if (x_.num_atoms() != y_.num_atoms() || x_.num_bonds() != y_.num_bonds())
      return std::nullopt;
    order_atoms();
    if (!extend(0))
      return std::nullopt;
    return f_;
  }

private:
  bool compatible(int i, int j) const {
    const Atom &a = x_.atom(i), &b = y_.atom(j);
    return a.element == b.element && a.charge == b.charge
           && a.isotope == b.isotope && a.hcount == b.hcount
           && x_.degree(i) == y_.degree(j);
  }

  // Mapped atoms first, then breadth-first so every later atom has an
  // already placed neighbour when possible.
  void order_atoms() {
    std::vector<char> seen(x_.num_atoms(), 0);
    std::vector<int> seeds;
    for (int i = 0; i < x_.num_atoms(); ++i)
      if (x_.atom(i).map != 0 && y_.find_map(x_.atom(i).map) >= 0)
        seeds.push_back(i);
    for (int i = 0; i < x_.num_atoms(); ++i)
      seeds.push_back(i);
    for (int s: seeds) {
      if (seen[s])
        continue;
      std::deque<int> q { s };
      seen[s] = 1;
      while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        order_.push_back(u);
        for (const Neighbor &n: x_.neighbors(u)) {
          if (!seen[n.atom]) {
            seen[n.atom] = 1;
            q.push_back(n.atom);
          }
        }
      }
    }
  }

  bool consistent(int i, int j) const {
    for (const Neighbor &n: x_.neighbors(i)) {
      const int fj = f_[n.atom];
      if (fj >= 0 && y_.bond_order(j, fj) != x_.bond(n.bond).order)
        return false;
    }
    return true;
  }

  bool extend(std::size_t k) {
    if (k == order_.size())
      return true;
    const int i = order_[k];
    std::vector<int> cands;
    // Candidates come from the image of a placed neighbour when one exists.
    int anchor = -1;
    for (const Neighbor &n: x_.neighbors(i))
      if (f_[n.atom] >= 0) {
        anchor = f_[n.atom];
        break;
      }
    if (anchor >= 0) {
      for (const Neighbor &n: y_.neighbors(anchor))
        cands.push_back(n.atom);
    } else {
      for (int j = 0; j < y_.num_atoms(); ++j)
        cands.push_back(j);
    }
    const int m = x_.atom(i).map;
    if (m != 0) {
      const int same = y_.find_map(m);
      auto it = std::find(cands.begin(), cands.end(), same);
      if (it != cands.end())
        std::rotate(cands.begin(), it, it + 1);
    }
    for (int j: cands) {
      if (used_[j] || !compatible(i, j) || !consistent(i, j))
        continue;
      f_[i] = j;
      used_[j] = 1;
      if (extend(k + 1))
        return true;
      used_[j] = 0;
      f_[i] = -1;
    }
    return false;
  }

  const MolGraph &x_;
  const MolGraph &y_;
  std::vector<int> f_;
  std::vector<char> used_;
  std::vector<int> order_;
};

} // namespace

std::optional<std::vector<int>> find_isomorphism(const MolGraph &x,
                                                 const MolGraph &y) {
  return Matcher(x, y).run();
}

} // namespace mech
