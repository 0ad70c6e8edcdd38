//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/layout.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

namespace mech {
namespace {

constexpr double kPi = std::numbers::pi;

// Shortest cycle through bond (a, b), as an ordered atom path from a to b.
std::vector<int> smallest_ring(const MolGraph &g, int a, int b) {
  std::vector<int> prev(g.num_atoms(), -2);
  std::deque<int> queue { a };
  prev[a] = -1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == b)
      break;
    for (const Neighbor &n: g.neighbors(u)) {
      if ((u == a && n.atom == b) || prev[n.atom] != -2)
        continue;
      prev[n.atom] = u;
      queue.push_back(n.atom);
    }
  }
  if (prev[b] == -2)
    return {};
  std::vector<int> path;
  for (int v = b; v != -1; v = prev[v])
    path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

class Layout {
public:
  explicit Layout(const MolGraph &g)
      : g_(g), pos_(g.num_atoms()), placed_(g.num_atoms(), 0) {
    std::set<std::vector<int>> seen;
    for (const Bond &b: g.bonds()) {
      auto ring = smallest_ring(g, std::min(b.a, b.b), std::max(b.a, b.b));
      if (ring.size() < 3)
        continue;
      auto key = ring;
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second)
        rings_.push_back(std::move(ring));
    }
  }

  std::vector<Point> run() {
    double offset = 0;
    for (const auto &comp: components(g_)) {
      place_component(comp.front());
      double lo = 1e300, hi = -1e300;
      for (int i: comp) {
        lo = std::min(lo, pos_[i].x);
        hi = std::max(hi, pos_[i].x);
      }
      for (int i: comp)
        pos_[i].x += offset - lo;
      offset += hi - lo + 2.0;
    }
    for (Point &p: pos_) {
      p.x = std::round(p.x * 1e4) / 1e4 + 0.0;
      p.y = std::round(p.y * 1e4) / 1e4 + 0.0;
    }
    return pos_;
  }

private:
  void put(int i, Point p) {
    pos_[i] = p;
    placed_[i] = 1;
    queue_.push_back(i);
  }

  // Mean direction from u towards its placed neighbours, or nothing.
  bool occupied_direction(int u, double &angle) const {
    double x = 0, y = 0;
    int n = 0;
    for (const Neighbor &nb: g_.neighbors(u)) {
      if (!placed_[nb.atom])
        continue;
      x += pos_[nb.atom].x - pos_[u].x;
      y += pos_[nb.atom].y - pos_[u].y;
      ++n;
    }
    if (n == 0 || std::hypot(x, y) < 1e-9)
      return false;
    angle = std::atan2(y, x);
    return true;
  }

  // Ring through (u, v) with only u placed, or sharing exactly one placed
  // edge with u on it.
  bool place_ring(int u, int v) {
    for (const auto &ring: rings_) {
      const auto iu = std::find(ring.begin(), ring.end(), u);
      const auto iv = std::find(ring.begin(), ring.end(), v);
      if (iu == ring.end() || iv == ring.end())
        continue;
      const int n = static_cast<int>(ring.size());
      const int pu = static_cast<int>(iu - ring.begin());
      const int pv = static_cast<int>(iv - ring.begin());
      if ((pu + 1) % n != pv && (pv + 1) % n != pu)
        continue;
      // Cycle order starting at u and stepping towards v.
      const int step = (pu + 1) % n == pv ? 1 : n - 1;
      std::vector<int> order;
      for (int k = 0; k < n; ++k)
        order.push_back(ring[(pu + k * step) % n]);
      int placed = 0;
      for (int a: order)
        placed += placed_[a];
      const double radius = 0.5 / std::sin(kPi / n);
      if (placed == 1) {
        double occ = 0;
        const double away = occupied_direction(u, occ) ? occ + kPi : 0.0;
        const Point c { pos_[u].x + radius * std::cos(away),
                        pos_[u].y + radius * std::sin(away) };
        const double a0 = std::atan2(pos_[u].y - c.y, pos_[u].x - c.x);
        for (int k = 1; k < n; ++k)
          put(order[k], { c.x + radius * std::cos(a0 + 2 * kPi * k / n),
                          c.y + radius * std::sin(a0 + 2 * kPi * k / n) });
        return true;
      }
      if (placed == 2 && placed_[order[n - 1]]) {
        // Fused on edge (w, u) where w = order[n-1]; grow on the far side.
        const int w = order[n - 1];
        const Point m { (pos_[u].x + pos_[w].x) / 2, (pos_[u].y + pos_[w].y) / 2 };
        double nx = -(pos_[w].y - pos_[u].y), ny = pos_[w].x - pos_[u].x;
        const double len = std::hypot(nx, ny);
        nx /= len;
        ny /= len;
        // Pick the side away from the other neighbours of u and w.
        double sx = 0, sy = 0;
        for (int a: { u, w })
          for (const Neighbor &nb: g_.neighbors(a))
            if (placed_[nb.atom] && nb.atom != u && nb.atom != w) {
              sx += pos_[nb.atom].x - m.x;
              sy += pos_[nb.atom].y - m.y;
            }
        if (sx * nx + sy * ny > 0) {
          nx = -nx;
          ny = -ny;
        }
        const double apothem = 0.5 / std::tan(kPi / n);
        const Point c { m.x + apothem * nx, m.y + apothem * ny };
        const double a0 = std::atan2(pos_[u].y - c.y, pos_[u].x - c.x);
        const double aw = std::atan2(pos_[w].y - c.y, pos_[w].x - c.x);
        // Walk away from w.
        double d = a0 - aw;
        while (d > kPi)
          d -= 2 * kPi;
        while (d < -kPi)
          d += 2 * kPi;
        const double dir = d > 0 ? 1.0 : -1.0;
        for (int k = 1; k < n - 1; ++k)
          put(order[k], { c.x + radius * std::cos(a0 + dir * 2 * kPi * k / n),
                          c.y + radius * std::sin(a0 + dir * 2 * kPi * k / n) });
        return true;
      }
    }
    return false;
  }

  void place_component(int root) {
    put(root, { 0, 0 });
    std::vector<int> depth(g_.num_atoms(), 0);
    while (!queue_.empty()) {
      const int u = queue_.front();
      queue_.pop_front();
      for (const Neighbor &nb: g_.neighbors(u))
        if (!placed_[nb.atom] && place_ring(u, nb.atom))
          for (int i = 0; i < g_.num_atoms(); ++i)
            if (placed_[i] && depth[i] == 0 && i != root)
              depth[i] = depth[u] + 1;
      std::vector<int> todo;
      for (const Neighbor &nb: g_.neighbors(u))
        if (!placed_[nb.atom])
          todo.push_back(nb.atom);
      if (todo.empty())
        continue;
      double base = 0;
      const bool has_parent = occupied_direction(u, base);
      const int m = static_cast<int>(todo.size());
      for (int k = 0; k < m; ++k) {
        double angle;
        if (!has_parent) {
          angle = (m == 1 ? -kPi / 6 : 2 * kPi * k / m);
        } else if (m == 1) {
          angle = base + ((depth[u] % 2) ? 2 * kPi / 3 : -2 * kPi / 3);
        } else {
          angle = base + 2 * kPi * (k + 1) / (m + 1);
        }
        depth[todo[k]] = depth[u] + 1;
        put(todo[k], { pos_[u].x + std::cos(angle), pos_[u].y + std::sin(angle) });
      }
    }
  }

  const MolGraph &g_;
  std::vector<Point> pos_;
  std::vector<char> placed_;
  std::vector<std::vector<int>> rings_;
  std::deque<int> queue_;
};

} // namespace

std::vector<Point> layout_2d(const MolGraph &g) {
  return Layout(g).run();
}

} // namespace mech
