//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/applications.h"

#include <algorithm>
#include <deque>

#include "mech/taskgen.h"

namespace mech {

using nlohmann::json;

int AtomMap::image(int initial_map) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(),
                             std::pair<int, int>(initial_map, 0));
  return it != pairs.end() && it->first == initial_map ? it->second : 0;
}

AtomMap derive_atom_map(const Mechanism &m) {
  const Mechanism again = replay_steps(m.initial, m.steps);
  for (std::size_t k = 0; k < m.intermediates.size(); ++k) {
    if (!(again.intermediates[k] == m.intermediates[k]))
      throw Error("replay diverges from the recorded state after step "
                  + std::to_string(k + 1));
  }
  const MolGraph &a = m.initial.graph();
  const MolGraph &b = again.goal().graph();
  if (a.num_atoms() != b.num_atoms())
    throw Error("atom count changed during replay");
  AtomMap out;
  for (int i = 0; i < a.num_atoms(); ++i) {
    const int map = a.atom(i).map;
    const int j = b.find_map(map);
    if (j < 0 || b.atom(j).element != a.atom(i).element)
      throw Error("atom " + std::to_string(map) + " has no image in the final state");
    out.pairs.emplace_back(map, map);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  out.mapped_reaction =
      write_smiles(a, MapMode::kAll) + ">>" + write_smiles(b, MapMode::kAll);
  return out;
}

const char *to_string(Role r) {
  switch (r) {
  case Role::kProductContributor:
    return "product-contributor";
  case Role::kByproductContributor:
    return "by-product-contributor";
  case Role::kCatalyst:
    return "catalyst";
  case Role::kSpectator:
    return "spectator";
  }
  return "unknown";
}

namespace {

std::vector<std::vector<Arrow>> resolved_steps(const Mechanism &m) {
  std::vector<std::vector<Arrow>> out;
  for (std::size_t k = 0; k < m.steps.size(); ++k)
    out.push_back(resolve_step(m.before(k), m.steps[k]));
  return out;
}

std::set<int> touched_maps(const std::vector<std::vector<Arrow>> &steps) {
  std::set<int> out;
  for (const auto &arrows: steps)
    for (const Arrow &x: arrows)
      for (int v: { x.a, x.b, x.c })
        if (v != 0)
          out.insert(v);
  return out;
}

} // namespace

std::set<int> referenced_atoms(const Mechanism &m) {
  return touched_maps(resolved_steps(m));
}

std::vector<SpeciesRole> classify_roles(const Mechanism &m) {
  const std::set<int> touched = referenced_atoms(m);
  const MolGraph &g = m.initial.graph();
  const MolGraph &fin = m.goal().graph();

  std::map<std::string, int> final_copies;
  std::set<int> product_maps;
  const std::vector<std::string> main = State::parse(main_product(m), false).species();
  for (const auto &comp: components(fin)) {
    const std::string key = canonical_form(subgraph(fin, comp));
    ++final_copies[key];
    if (std::find(main.begin(), main.end(), key) != main.end())
      for (int i: comp)
        product_maps.insert(fin.atom(i).map);
  }

  std::vector<SpeciesRole> out;
  for (const auto &comp: components(g)) {
    SpeciesRole r;
    r.smiles = canonical_form(subgraph(g, comp));
    for (int i: comp)
      r.maps.push_back(g.atom(i).map);
    out.push_back(std::move(r));
  }
  auto participates = [&](const SpeciesRole &r) {
    return std::any_of(r.maps.begin(), r.maps.end(),
                       [&](int v) { return touched.count(v) > 0; });
  };
  // Untouched copies claim their final-state counterparts first.
  for (SpeciesRole &r: out)
    if (!participates(r)) {
      r.role = Role::kSpectator;
      --final_copies[r.smiles];
    }
  for (SpeciesRole &r: out) {
    if (!participates(r))
      continue;
    if (final_copies[r.smiles] > 0) {
      r.role = Role::kCatalyst;
      --final_copies[r.smiles];
    } else if (std::any_of(r.maps.begin(), r.maps.end(),
                           [&](int v) { return product_maps.count(v) > 0; })) {
      r.role = Role::kProductContributor;
    } else {
      r.role = Role::kByproductContributor;
    }
  }
  return out;
}

MechTemplate extract_template(const Mechanism &m, int radius) {
  return extract_template(m, radius, classify_roles(m));
}

MechTemplate extract_template(const Mechanism &m, int radius,
                              const std::vector<SpeciesRole> &roles) {
  const auto steps = resolved_steps(m);
  const std::set<int> touched = touched_maps(steps);
  const MolGraph &g = m.initial.graph();

  MechTemplate t;
  t.radius = radius;
  for (const auto &arrows: steps)
    t.steps.push_back(format_arrows(arrows));

  for (const SpeciesRole &r: roles) {
    if (r.role == Role::kSpectator)
      continue;
    TemplateSpecies ts;
    ts.role = r.role;
    std::vector<int> dist(g.num_atoms(), -1);
    std::deque<int> queue;
    for (int v: r.maps) {
      if (touched.count(v) == 0)
        continue;
      ts.anchors.push_back(v);
      const int i = g.find_map(v);
      dist[i] = 0;
      queue.push_back(i);
    }
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      if (radius != MechTemplate::kInfinite && dist[u] >= radius)
        continue;
      for (const Neighbor &n: g.neighbors(u))
        if (dist[n.atom] < 0) {
          dist[n.atom] = dist[u] + 1;
          queue.push_back(n.atom);
        }
    }
    std::vector<int> keep;
    for (int v: r.maps) {
      const int i = g.find_map(v);
      if (dist[i] >= 0) {
        keep.push_back(i);
        ts.atoms.push_back(v);
      }
    }
    std::sort(ts.anchors.begin(), ts.anchors.end());
    std::sort(ts.atoms.begin(), ts.atoms.end());
    WriteOptions opts;
    opts.maps = MapMode::kMinimal;
    opts.keep_maps.insert(ts.anchors.begin(), ts.anchors.end());
    opts.bracket_all = true;
    opts.stereo = false;
    ts.pattern = write_smiles(subgraph(g, keep), opts);
    t.species.push_back(std::move(ts));
  }
  return t;
}

std::string MechTemplate::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < species.size(); ++k) {
    if (k > 0)
      out += '.';
    out += '{';
    out += mech::to_string(species[k].role);
    out += '}';
    out += species[k].pattern;
  }
  out += '|';
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (k > 0)
      out += " >> ";
    out += steps[k];
  }
  return out;
}

json MechTemplate::to_json() const {
  json j;
  j["radius"] = radius == kInfinite ? json("inf") : json(radius);
  j["species"] = json::array();
  for (const TemplateSpecies &s: species)
    j["species"].push_back({ { "role", mech::to_string(s.role) },
                             { "pattern", s.pattern },
                             { "anchors", s.anchors },
                             { "atoms", s.atoms } });
  j["steps"] = steps;
  j["template"] = to_string();
  return j;
}

} // namespace mech
