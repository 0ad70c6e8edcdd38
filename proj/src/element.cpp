//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/element.h"

#include <array>

namespace mech {
namespace {

using enum Block;

// clang-format off
constexpr std::array kElements = {
  Element { 1, "H",  1, kS, 1, 2.20 },
  Element { 2, "He", 1, kS, 2, 0.00 },
  Element { 3, "Li", 2, kS, 1, 0.98 },
  Element { 4, "Be", 2, kS, 2, 1.57 },
  Element { 5, "B",  2, kP, 3, 2.04 },
  Element { 6, "C",  2, kP, 4, 2.55 },
  Element { 7, "N",  2, kP, 5, 3.04 },
  Element { 8, "O",  2, kP, 6, 3.44 },
  Element { 9, "F",  2, kP, 7, 3.98 },
  Element {10, "Ne", 2, kP, 8, 0.00 },
  Element {11, "Na", 3, kS, 1, 0.93 },
  Element {12, "Mg", 3, kS, 2, 1.31 },
  Element {13, "Al", 3, kP, 3, 1.61 },
  Element {14, "Si", 3, kP, 4, 1.90 },
  Element {15, "P",  3, kP, 5, 2.19 },
  Element {16, "S",  3, kP, 6, 2.58 },
  Element {17, "Cl", 3, kP, 7, 3.16 },
  Element {18, "Ar", 3, kP, 8, 0.00 },
  Element {19, "K",  4, kS, 1, 0.82 },
  Element {20, "Ca", 4, kS, 2, 1.00 },
  Element {21, "Sc", 4, kD, 3, 1.36 },
  Element {22, "Ti", 4, kD, 4, 1.54 },
  Element {23, "V",  4, kD, 5, 1.63 },
  Element {24, "Cr", 4, kD, 6, 1.66 },
  Element {25, "Mn", 4, kD, 7, 1.55 },
  Element {26, "Fe", 4, kD, 8, 1.83 },
  Element {27, "Co", 4, kD, 9, 1.88 },
  Element {28, "Ni", 4, kD, 10, 1.91 },
  Element {29, "Cu", 4, kD, 11, 1.90 },
  Element {30, "Zn", 4, kD, 12, 1.65 },
  Element {31, "Ga", 4, kP, 3, 1.81 },
  Element {32, "Ge", 4, kP, 4, 2.01 },
  Element {33, "As", 4, kP, 5, 2.18 },
  Element {34, "Se", 4, kP, 6, 2.55 },
  Element {35, "Br", 4, kP, 7, 2.96 },
  Element {36, "Kr", 4, kP, 8, 3.00 },
  Element {37, "Rb", 5, kS, 1, 0.82 },
  Element {38, "Sr", 5, kS, 2, 0.95 },
  Element {39, "Y",  5, kD, 3, 1.22 },
  Element {40, "Zr", 5, kD, 4, 1.33 },
  Element {41, "Nb", 5, kD, 5, 1.60 },
  Element {42, "Mo", 5, kD, 6, 2.16 },
  Element {43, "Tc", 5, kD, 7, 1.90 },
  Element {44, "Ru", 5, kD, 8, 2.20 },
  Element {45, "Rh", 5, kD, 9, 2.28 },
  Element {46, "Pd", 5, kD, 10, 2.20 },
  Element {47, "Ag", 5, kD, 11, 1.93 },
  Element {48, "Cd", 5, kD, 12, 1.69 },
  Element {49, "In", 5, kP, 3, 1.78 },
  Element {50, "Sn", 5, kP, 4, 1.96 },
  Element {51, "Sb", 5, kP, 5, 2.05 },
  Element {52, "Te", 5, kP, 6, 2.10 },
  Element {53, "I",  5, kP, 7, 2.66 },
  Element {54, "Xe", 5, kP, 8, 2.60 },
  Element {55, "Cs", 6, kS, 1, 0.79 },
  Element {56, "Ba", 6, kS, 2, 0.89 },
  Element {57, "La", 6, kD, 3, 1.10 },
  Element {58, "Ce", 6, kF, 0, 1.12 },
  Element {59, "Pr", 6, kF, 0, 1.13 },
  Element {60, "Nd", 6, kF, 0, 1.14 },
  Element {61, "Pm", 6, kF, 0, 0.00 },
  Element {62, "Sm", 6, kF, 0, 1.17 },
  Element {63, "Eu", 6, kF, 0, 0.00 },
  Element {64, "Gd", 6, kF, 0, 1.20 },
  Element {65, "Tb", 6, kF, 0, 0.00 },
  Element {66, "Dy", 6, kF, 0, 1.22 },
  Element {67, "Ho", 6, kF, 0, 1.23 },
  Element {68, "Er", 6, kF, 0, 1.24 },
  Element {69, "Tm", 6, kF, 0, 1.25 },
  Element {70, "Yb", 6, kF, 0, 0.00 },
  Element {71, "Lu", 6, kF, 0, 1.27 },
  Element {72, "Hf", 6, kD, 4, 1.30 },
  Element {73, "Ta", 6, kD, 5, 1.50 },
  Element {74, "W",  6, kD, 6, 2.36 },
  Element {75, "Re", 6, kD, 7, 1.90 },
  Element {76, "Os", 6, kD, 8, 2.20 },
  Element {77, "Ir", 6, kD, 9, 2.20 },
  Element {78, "Pt", 6, kD, 10, 2.28 },
  Element {79, "Au", 6, kD, 11, 2.54 },
  Element {80, "Hg", 6, kD, 12, 2.00 },
  Element {81, "Tl", 6, kP, 3, 1.62 },
  Element {82, "Pb", 6, kP, 4, 2.33 },
  Element {83, "Bi", 6, kP, 5, 2.02 },
  Element {84, "Po", 6, kP, 6, 2.00 },
  Element {85, "At", 6, kP, 7, 2.20 },
  Element {86, "Rn", 6, kP, 8, 0.00 },
};
// clang-format on

} // namespace

const Element *element_by_number(int z) noexcept {
  if (z < 1 || z > static_cast<int>(kElements.size()))
    return nullptr;
  return &kElements[z - 1];
}

const Element *element_by_symbol(std::string_view symbol) noexcept {
  for (const Element &e: kElements)
    if (e.symbol == symbol)
      return &e;
  return nullptr;
}

} // namespace mech
