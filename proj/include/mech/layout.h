//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "mech/molgraph.h"

namespace mech {

struct Point {
  double x = 0;
  double y = 0;
};

// Deterministic 2D depiction with unit bond length: rings as regular
// polygons (fused rings share an edge), chains in zigzag, components side
// by side along x. One point per atom, by index.
std::vector<Point> layout_2d(const MolGraph &g);

} // namespace mech
