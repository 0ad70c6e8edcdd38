//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string_view>

namespace mech {

enum class Block : char { kS = 's', kP = 'p', kD = 'd', kF = 'f' };

struct Element {
  int atomic_number;
  std::string_view symbol;
  int period;
  Block block;
  // Valence electron count; 0 when the element carries no valence data.
  int valence_electrons;
  double electronegativity; // Pauling, 0 if unknown
};

// Returns nullptr for unknown atomic numbers.
const Element *element_by_number(int z) noexcept;
// Case-sensitive symbol lookup ("Cl", not "cl").
const Element *element_by_symbol(std::string_view symbol) noexcept;

inline const Element &element(int z) {
  return *element_by_number(z);
}

inline constexpr int kHydrogen = 1;
inline constexpr int kBoron = 5;
inline constexpr int kCarbon = 6;
inline constexpr int kNitrogen = 7;
inline constexpr int kOxygen = 8;

} // namespace mech
