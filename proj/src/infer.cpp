//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "mech/convert.h"

namespace mech {
namespace {

// Unit contributions of one arrow to the residual delta vectors.
struct Candidate {
  Arrow arrow;
  std::vector<std::pair<int, int>> bonds;   // (pair slot, +-1)
  std::vector<std::pair<int, int>> charges; // (atom index, +-1)
};

class CoverSearch {
public:
  CoverSearch(const MolGraph &r, const MolGraph &p, int max_arrows)
      : r_(r), max_(max_arrows) {
    std::map<std::pair<int, int>, int> delta;
    auto add = [&](const MolGraph &g, int sign) {
      for (const Bond &b: g.bonds()) {
        const int x = r_.find_map(g.atom(b.a).map);
        const int y = r_.find_map(g.atom(b.b).map);
        delta[{ std::min(x, y), std::max(x, y) }] += sign * b.order;
      }
    };
    add(p, +1);
    add(r_, -1);
    for (const auto &[k, d]: delta) {
      if (d == 0)
        continue;
      slot_[k] = static_cast<int>(bond_res_.size());
      pairs_.push_back(k);
      bond_res_.push_back(d);
    }
    charge_res_.assign(r_.num_atoms(), 0);
    for (int i = 0; i < r_.num_atoms(); ++i)
      charge_res_[i] =
          p.atom(p.find_map(r_.atom(i).map)).charge - r_.atom(i).charge;
    build_candidates();
  }

  std::optional<std::vector<Arrow>> run() {
    for (int k = 0; k <= max_; ++k) {
      chosen_.clear();
      if (dfs(0, k))
        return result_;
    }
    return std::nullopt;
  }

private:
  int delta(int x, int y) const {
    auto it = slot_.find({ std::min(x, y), std::max(x, y) });
    return it == slot_.end() ? 0 : bond_res_[it->second];
  }

  int slot(int x, int y) const {
    return slot_.at({ std::min(x, y), std::max(x, y) });
  }

  void build_candidates() {
    std::set<int> atoms;
    for (const auto &[x, y]: pairs_) {
      atoms.insert(x);
      atoms.insert(y);
    }
    for (int x: atoms) {
      for (int y: atoms) {
        if (x == y)
          continue;
        const int d = delta(x, y);
        const int mx = r_.atom(x).map, my = r_.atom(y).map;
        if (d > 0 && nonbonding_electrons(r_, x) >= 2)
          cands_.push_back({ Arrow::attack(mx, my), { { slot(x, y), +1 } },
                             { { x, +1 }, { y, -1 } } });
        if (d < 0) {
          cands_.push_back({ Arrow::ionize(mx, my), { { slot(x, y), -1 } },
                             { { x, +1 }, { y, -1 } } });
          for (int z: atoms) {
            if (z == x || z == y || delta(y, z) <= 0)
              continue;
            cands_.push_back(
                { Arrow::bond_attack(mx, my, r_.atom(z).map),
                  { { slot(x, y), -1 }, { slot(y, z), +1 } },
                  { { x, +1 }, { z, -1 } } });
          }
        }
      }
    }
    std::sort(cands_.begin(), cands_.end(),
              [](const Candidate &a, const Candidate &b) { return a.arrow < b.arrow; });
  }

  bool dfs(std::size_t from, int left) {
    int bond_abs = 0, charge_abs = 0;
    for (int v: bond_res_)
      bond_abs += std::abs(v);
    for (int v: charge_res_)
      charge_abs += std::abs(v);
    if (left == 0) {
      if (bond_abs != 0 || charge_abs != 0)
        return false;
      result_.clear();
      for (std::size_t i: chosen_)
        result_.push_back(cands_[i].arrow);
      return true;
    }
    if (bond_abs > 2 * left || charge_abs > 2 * left || bond_abs == 0)
      return false;
    for (std::size_t i = from; i < cands_.size(); ++i) {
      const Candidate &c = cands_[i];
      bool shrinks = true;
      for (const auto &[s, d]: c.bonds)
        shrinks = shrinks && bond_res_[s] * d > 0;
      if (!shrinks)
        continue;
      for (const auto &[s, d]: c.bonds)
        bond_res_[s] -= d;
      for (const auto &[a, d]: c.charges)
        charge_res_[a] -= d;
      chosen_.push_back(i);
      const bool ok = dfs(i, left - 1);
      chosen_.pop_back();
      for (const auto &[s, d]: c.bonds)
        bond_res_[s] += d;
      for (const auto &[a, d]: c.charges)
        charge_res_[a] += d;
      if (ok)
        return true;
    }
    return false;
  }

  const MolGraph &r_;
  int max_;
  std::map<std::pair<int, int>, int> slot_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> bond_res_;
  std::vector<int> charge_res_;
  std::vector<Candidate> cands_;
  std::vector<std::size_t> chosen_;
  std::vector<Arrow> result_;
};

// Ordering with the most sink-to-source links; ties go to the smallest
// sequence.
std::vector<Arrow> chain_order(std::vector<Arrow> arrows) {
  std::sort(arrows.begin(), arrows.end());
  std::vector<Arrow> best = arrows;
  int best_links = -1;
  do {
    int links = 0;
    for (std::size_t k = 1; k < arrows.size(); ++k)
      links += arrows[k].kind != ArrowKind::kAttack
               && arrows[k].a == arrows[k - 1].sink();
    if (links > best_links) {
      best_links = links;
      best = arrows;
    }
  } while (std::next_permutation(arrows.begin(), arrows.end()));
  return best;
}

void require_mapped(const MolGraph &g, const char *side) {
  for (int i = 0; i < g.num_atoms(); ++i)
    if (g.atom(i).map == 0)
      throw ConvertError("unmapped-atom",
                         std::string(side) + " atom #" + std::to_string(i)
                             + " carries no map number");
}

} // namespace

Inference infer_arrows(const MolGraph &reactant, const MolGraph &product,
                       const InferOptions &opts) {
  const MolGraph r = fold_hydrogens(reactant, true);
  const MolGraph p = fold_hydrogens(product, true);
  require_mapped(r, "reactant");
  require_mapped(p, "product");
  if (r.num_atoms() != p.num_atoms())
    throw ConvertError("map-mismatch", "reactant and product map different atom sets");
  for (int i = 0; i < r.num_atoms(); ++i) {
    const int j = p.find_map(r.atom(i).map);
    if (j < 0 || p.atom(j).element != r.atom(i).element)
      throw ConvertError("map-mismatch", "map " + std::to_string(r.atom(i).map)
                                             + " differs between the sides");
  }

  // Shared hydrogens keep one map on both sides; surplus reactant hydrogens
  // are donors and product deficits are slots to fill.
  int next = std::max(r.max_map(), p.max_map());
  MolGraph rx = r, px = p;
  std::vector<std::pair<int, int>> donors; // (hydrogen map, heavy map)
  std::vector<int> slots;                  // heavy map
  auto add_h = [](MolGraph &g, int heavy, int map) {
    Atom h;
    h.element = kHydrogen;
    h.explicit_h = true;
    h.map = map;
    const int k = g.add_atom(h);
    g.add_bond(heavy, k, 1);
  };
  for (int i = 0; i < r.num_atoms(); ++i) {
    const int m = r.atom(i).map;
    const int j = p.find_map(m);
    const int hr = r.atom(i).hcount, hp = p.atom(j).hcount;
    rx.set_hcount(i, 0);
    px.set_hcount(j, 0);
    for (int k = 0; k < std::min(hr, hp); ++k) {
      add_h(rx, i, ++next);
      add_h(px, j, next);
    }
    for (int k = hp; k < hr; ++k) {
      add_h(rx, i, ++next);
      donors.push_back({ next, m });
    }
    for (int k = hr; k < hp; ++k)
      slots.push_back(m);
  }
  if (donors.size() != slots.size())
    throw ConvertError("unbalanced", "hydrogen counts differ between the sides");

  std::optional<std::vector<Arrow>> best;
  int tried = 0;
  std::vector<char> used(donors.size(), 0);
  std::vector<int> pick(slots.size(), -1);
  auto evaluate = [&]() {
    MolGraph target = px;
    for (std::size_t k = 0; k < slots.size(); ++k)
      add_h(target, target.find_map(slots[k]), donors[pick[k]].first);
    CoverSearch search(rx, target, opts.max_arrows);
    auto found = search.run();
    if (found && (!best || found->size() < best->size()
                  || (found->size() == best->size() && *found < *best)))
      best = std::move(found);
  };
  auto assign = [&](auto &&self, std::size_t k) -> void {
    if (tried >= opts.max_assignments)
      return;
    if (k == slots.size()) {
      ++tried;
      evaluate();
      return;
    }
    std::set<int> heavy_tried;
    for (std::size_t d = 0; d < donors.size(); ++d) {
      if (used[d] || !heavy_tried.insert(donors[d].second).second)
        continue;
      used[d] = 1;
      pick[k] = static_cast<int>(d);
      self(self, k + 1);
      used[d] = 0;
    }
  };
  assign(assign, 0);

  if (!best)
    throw ConvertError("no-arrow-set",
                       "no set of at most " + std::to_string(opts.max_arrows)
                           + " arrows reproduces the product");
  return { rx, chain_order(*best) };
}

} // namespace mech
