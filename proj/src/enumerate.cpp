//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <set>
#include <unordered_map>

#include "mech/engine.h"

namespace mech {
namespace {

class Enumerator {
public:
  Enumerator(const State &s, const EnumerateOptions &opts)
      : g_(s.graph()), table_(opts.table != nullptr ? *opts.table
                                                    : ValenceTable::defaults()),
        max_arrows_(opts.max_arrows), n_(g_.num_atoms()),
        order_(static_cast<std::size_t>(n_) * n_, 0), charge_(n_),
        valence_(n_), touched_(n_, 0) {
    for (int i = 0; i < n_; ++i) {
      charge_[i] = g_.atom(i).charge;
      valence_[i] = g_.valence(i);
      map_.push_back(g_.atom(i).map);
      lone_pair_.push_back(nonbonding_electrons(g_, i) >= 2);
    }
    for (const Bond &b: g_.bonds()) {
      order_[idx(b.a, b.b)] = order_[idx(b.b, b.a)] = b.order;
      pre_bonds_.push_back({ b.a, b.b });
      pre_bonds_.push_back({ b.b, b.a });
    }
    std::sort(pre_bonds_.begin(), pre_bonds_.end());
  }

  std::vector<MoveSet> run() {
    if (max_arrows_ <= 0)
      return {};
    for (int a = 0; a < n_; ++a) {
      if (!lone_pair_[a])
        continue;
      for (int b = 0; b < n_; ++b)
        if (b != a)
          step({ Step::kAttack, a, b, -1 }, a, 1);
    }
    for (const auto &[a, b]: pre_bonds_) {
      step({ Step::kIonize, a, b, -1 }, a, 1);
      for (int c = 0; c < n_; ++c)
        if (c != a && c != b)
          step({ Step::kBondAttack, a, b, c }, a, 1);
    }

    std::sort(found_.begin(), found_.end());
    std::vector<MoveSet> out;
    std::set<std::vector<Arrow>> seen;
    for (MoveSet &m: found_) {
      std::vector<Arrow> key = m.arrows;
      std::sort(key.begin(), key.end());
      if (seen.insert(std::move(key)).second)
        out.push_back(std::move(m));
    }
    return out;
  }

private:
  struct Step {
    enum Kind { kAttack, kIonize, kBondAttack } kind;
    int a, b, c;

    int sink() const { return kind == kBondAttack ? c : b; }
  };

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }

  void bump_order(int i, int j, int d) {
    order_[idx(i, j)] += d;
    order_[idx(j, i)] += d;
    valence_[i] += d;
    valence_[j] += d;
  }

  void touch(int i, int d) {
    if (touched_[i] == 0 && d > 0)
      touched_list_.push_back(i);
    touched_[i] += d;
  }

  void apply_delta(const Step &s, int sign) {
    switch (s.kind) {
    case Step::kAttack:
      bump_order(s.a, s.b, sign);
      break;
    case Step::kIonize:
      bump_order(s.a, s.b, -sign);
      break;
    case Step::kBondAttack:
      bump_order(s.a, s.b, -sign);
      bump_order(s.b, s.c, sign);
      break;
    }
    charge_[s.a] += sign;
    charge_[s.sink()] -= sign;
  }

  bool valid(int i) {
    const int z = g_.atom(i).element;
    const long key = (static_cast<long>(z) * 64 + (charge_[i] + 32)) * 64
                     + valence_[i];
    auto it = cache_.find(key);
    if (it != cache_.end())
      return it->second;
    const bool ok = valence_[i] >= 0
                    && !table_.check(z, charge_[i], valence_[i]).has_value();
    cache_.emplace(key, ok);
    return ok;
  }

  bool orders_ok(const Step &s) const {
    auto in_range = [&](int i, int j) {
      const int o = order_[idx(i, j)];
      return o >= 0 && o <= 3;
    };
    if (!in_range(s.a, s.b))
      return false;
    return s.kind != Step::kBondAttack || in_range(s.b, s.c);
  }

  bool changed() const {
    for (int i: touched_list_) {
      if (touched_[i] == 0)
        continue;
      if (charge_[i] != g_.atom(i).charge || valence_[i] != g_.valence(i))
        return true;
    }
    for (const Step &s: chain_) {
      if (order_[idx(s.a, s.b)] != g_.bond_order(s.a, s.b))
        return true;
      if (s.kind == Step::kBondAttack
          && order_[idx(s.b, s.c)] != g_.bond_order(s.b, s.c))
        return true;
    }
    return false;
  }

  Arrow to_arrow(const Step &s) const {
    switch (s.kind) {
    case Step::kAttack:
      return Arrow::attack(map_[s.a], map_[s.b]);
    case Step::kIonize:
      return Arrow::ionize(map_[s.a], map_[s.b]);
    case Step::kBondAttack:
      break;
    }
    return Arrow::bond_attack(map_[s.a], map_[s.b], map_[s.c]);
  }

  void touch_step(const Step &s, int d) {
    touch(s.a, d);
    touch(s.b, d);
    if (s.kind == Step::kBondAttack)
      touch(s.c, d);
  }

  void step(const Step &s, int origin, int depth) {
    apply_delta(s, +1);
    touch_step(s, +1);
    chain_.push_back(s);
    bool orders = true;
    for (const Step &t: chain_)
      orders = orders && orders_ok(t);

    if (orders) {
      bool all_valid = true;
      bool relay_valid = true;
      const int sink = s.sink();
      for (int i: touched_list_) {
        if (touched_[i] == 0)
          continue;
        if (!valid(i)) {
          all_valid = false;
          if (i != origin && i != sink)
            relay_valid = false;
        }
      }
      if (all_valid && changed()) {
        MoveSet m;
        for (const Step &t: chain_)
          m.arrows.push_back(to_arrow(t));
        found_.push_back(std::move(m));
      }
      if (relay_valid && depth < max_arrows_) {
        auto lo = std::lower_bound(pre_bonds_.begin(), pre_bonds_.end(),
                                   std::pair<int, int>(sink, -1));
        for (auto it = lo; it != pre_bonds_.end() && it->first == sink; ++it) {
          const int x = it->second;
          step({ Step::kIonize, sink, x, -1 }, origin, depth + 1);
          for (int y = 0; y < n_; ++y)
            if (y != sink && y != x)
              step({ Step::kBondAttack, sink, x, y }, origin, depth + 1);
        }
      }
    }

    chain_.pop_back();
    touch_step(s, -1);
    while (!touched_list_.empty() && touched_[touched_list_.back()] == 0)
      touched_list_.pop_back();
    apply_delta(s, -1);
  }

  const MolGraph &g_;
  const ValenceTable &table_;
  int max_arrows_;
  int n_;
  std::vector<int> order_;
  std::vector<int> charge_;
  std::vector<int> valence_;
  std::vector<int> touched_;
  std::vector<int> touched_list_;
  std::vector<int> map_;
  std::vector<char> lone_pair_;
  std::vector<std::pair<int, int>> pre_bonds_;
  std::vector<Step> chain_;
  std::vector<MoveSet> found_;
  std::unordered_map<long, bool> cache_;
};

} // namespace

std::vector<MoveSet> enumerate_moves(const State &s,
                                     const EnumerateOptions &opts) {
  return Enumerator(s, opts).run();
}

} // namespace mech
