//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <map>
#include <string>

#include "mech/error.h"
#include "mech/smiles.h"
#include "mech/valence.h"

namespace mech {

const char *to_string(ParseErrorKind kind) {
  switch (kind) {
  case ParseErrorKind::kUnexpectedChar:
    return "unexpected character";
  case ParseErrorKind::kUnbalancedBracket:
    return "unbalanced bracket";
  case ParseErrorKind::kUnbalancedBranch:
    return "unbalanced branch";
  case ParseErrorKind::kUnclosedRing:
    return "unclosed ring";
  case ParseErrorKind::kUnknownElement:
    return "unknown element";
  case ParseErrorKind::kDuplicateMap:
    return "duplicate map number";
  case ParseErrorKind::kKekulization:
    return "cannot kekulize";
  case ParseErrorKind::kMissingSeparator:
    return "missing separator";
  case ParseErrorKind::kMalformedArrow:
    return "malformed arrow";
  case ParseErrorKind::kDanglingMap:
    return "dangling map reference";
  }
  return "parse error";
}

namespace {

std::span<const int> default_valences(int z) {
  static constexpr int kB[] = { 3 }, kC[] = { 4 }, kN[] = { 3, 5 },
                       kO[] = { 2 }, kS[] = { 2, 4, 6 }, kX[] = { 1 };
  switch (z) {
  case 5:
    return kB;
  case 6:
    return kC;
  case 7:
  case 15:
    return kN;
  case 8:
    return kO;
  case 16:
    return kS;
  case 9:
  case 17:
  case 35:
  case 53:
    return kX;
  default:
    return {};
  }
}

bool is_aromatic_symbol(std::string_view s) {
  return s == "b" || s == "c" || s == "n" || s == "o" || s == "p" || s == "s"
         || s == "se" || s == "as";
}

} // namespace

bool in_organic_subset(int z) {
  return !default_valences(z).empty();
}

int default_implicit_hydrogens(int z, int valence) {
  for (int v: default_valences(z))
    if (v >= valence)
      return v - valence;
  return 0;
}

std::vector<SmilesToken> lex_smiles(std::string_view s) {
  std::vector<SmilesToken> out;
  std::size_t i = 0;
  auto push = [&](SmilesTokenKind k, std::size_t len) {
    out.push_back({ k, s.substr(i, len), i });
    i += len;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '[') {
      const std::size_t j = s.find(']', i);
      const std::size_t k = s.find('[', i + 1);
      if (j == std::string_view::npos || k < j)
        throw ParseError(ParseErrorKind::kUnbalancedBracket, i,
                         "'[' without matching ']'");
      push(SmilesTokenKind::kBracketAtom, j - i + 1);
    } else if (c == ']') {
      throw ParseError(ParseErrorKind::kUnbalancedBracket, i,
                       "']' without matching '['");
    } else if (c == '(') {
      push(SmilesTokenKind::kBranchOpen, 1);
    } else if (c == ')') {
      push(SmilesTokenKind::kBranchClose, 1);
    } else if (c == '.') {
      push(SmilesTokenKind::kDot, 1);
    } else if (std::string_view("-=#$:/\\~").find(c)
               != std::string_view::npos) {
      push(SmilesTokenKind::kBond, 1);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      push(SmilesTokenKind::kRingClosure, 1);
    } else if (c == '%') {
      if (i + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1]))
          || !std::isdigit(static_cast<unsigned char>(s[i + 2])))
        throw ParseError(ParseErrorKind::kUnexpectedChar, i,
                         "'%' must be followed by two digits");
      push(SmilesTokenKind::kRingClosure, 3);
    } else if ((c == 'C' && i + 1 < s.size() && s[i + 1] == 'l')
               || (c == 'B' && i + 1 < s.size() && s[i + 1] == 'r')) {
      push(SmilesTokenKind::kOrganicAtom, 2);
    } else if (std::string_view("BCNOPSFIbcnops").find(c)
               != std::string_view::npos) {
      push(SmilesTokenKind::kOrganicAtom, 1);
    } else {
      throw ParseError(ParseErrorKind::kUnexpectedChar, i,
                       std::string("unexpected '") + c + "'");
    }
  }
  return out;
}

namespace {

struct ParsedAtom {
  Atom atom;
  bool aromatic = false;
  bool bracket = false;
  std::size_t offset = 0;
};

ParsedAtom parse_bracket(std::string_view lex, std::size_t offset) {
  ParsedAtom pa;
  pa.bracket = true;
  pa.offset = offset;
  std::size_t p = 1;
  const std::size_t end = lex.size() - 1;
  auto at = [&](std::size_t k) { return k < end ? lex[k] : '\0'; };
  auto digit = [&](std::size_t k) {
    return std::isdigit(static_cast<unsigned char>(at(k))) != 0;
  };
  auto read_int = [&]() {
    int v = 0;
    while (digit(p))
      v = v * 10 + (lex[p++] - '0');
    return v;
  };

  if (digit(p))
    pa.atom.isotope = read_int();

  std::string sym;
  if (std::islower(static_cast<unsigned char>(at(p)))) {
    if (is_aromatic_symbol(lex.substr(p, 2)) && p + 2 <= end) {
      sym = lex.substr(p, 2);
    } else {
      sym = lex.substr(p, 1);
    }
    if (!is_aromatic_symbol(sym))
      throw ParseError(ParseErrorKind::kUnknownElement, offset + p,
                       "unknown aromatic symbol '" + sym + "'");
    pa.aromatic = true;
    p += sym.size();
    sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
  } else if (std::isupper(static_cast<unsigned char>(at(p)))) {
    if (std::islower(static_cast<unsigned char>(at(p + 1)))
        && element_by_symbol(lex.substr(p, 2)) != nullptr) {
      sym = lex.substr(p, 2);
    } else {
      sym = lex.substr(p, 1);
    }
    p += sym.size();
  } else {
    throw ParseError(ParseErrorKind::kUnknownElement, offset + p,
                     "missing element symbol");
  }
  const Element *e = element_by_symbol(sym);
  if (e == nullptr)
    throw ParseError(ParseErrorKind::kUnknownElement, offset + 1,
                     "unknown element '" + sym + "'");
  pa.atom.element = e->atomic_number;
  pa.atom.explicit_h = e->atomic_number == kHydrogen;

  if (at(p) == '@') {
    const std::size_t start = p++;
    if (at(p) == '@') {
      ++p;
    } else {
      while (std::isupper(static_cast<unsigned char>(at(p))) && at(p) != 'H')
        ++p;
      while (digit(p))
        ++p;
    }
    pa.atom.chirality = lex.substr(start, p - start);
  }

  if (at(p) == 'H') {
    ++p;
    pa.atom.hcount = digit(p) ? read_int() : 1;
  }

  if (at(p) == '+' || at(p) == '-') {
    const char sign = at(p);
    int n = 0;
    while (at(p) == sign) {
      ++p;
      ++n;
    }
    if (n == 1 && digit(p))
      n = read_int();
    pa.atom.charge = sign == '+' ? n : -n;
  }

  if (at(p) == ':') {
    ++p;
    if (!digit(p))
      throw ParseError(ParseErrorKind::kUnexpectedChar, offset + p,
                       "map number expected after ':'");
    pa.atom.map = read_int();
  }

  if (p != end)
    throw ParseError(ParseErrorKind::kUnexpectedChar, offset + p,
                     std::string("unexpected '") + lex[p] + "' in bracket atom");
  return pa;
}

ParsedAtom parse_organic(std::string_view lex, std::size_t offset) {
  ParsedAtom pa;
  pa.offset = offset;
  std::string sym(lex);
  if (std::islower(static_cast<unsigned char>(sym[0]))) {
    pa.aromatic = true;
    sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
  }
  pa.atom.element = element_by_symbol(sym)->atomic_number;
  return pa;
}

// Assigns double bonds to aromatic bonds so that every aromatic atom that
// needs a pi bond gets exactly one.
class Kekulizer {
public:
  Kekulizer(const MolGraph &g, const std::vector<ParsedAtom> &atoms,
            const std::vector<char> &aromatic_bond)
      : g_(g), aromatic_bond_(aromatic_bond),
        need_(g.num_atoms(), 0), mate_(g.num_atoms(), -1) {
    for (int i = 0; i < g.num_atoms(); ++i)
      need_[i] = atoms[i].aromatic && needs_pi(atoms[i], i);
  }

  bool solve() { return match(); }

  // Bond indices that become double.
  std::vector<int> doubles() const {
    std::vector<int> out;
    for (int i = 0; i < g_.num_atoms(); ++i)
      if (mate_[i] > i)
        out.push_back(g_.find_bond(i, mate_[i]));
    return out;
  }

  int first_unmatched() const {
    for (int i = 0; i < g_.num_atoms(); ++i)
      if (need_[i] && mate_[i] < 0)
        return i;
    return -1;
  }

private:
  bool needs_pi(const ParsedAtom &pa, int i) const {
    int sigma = pa.bracket ? pa.atom.hcount : 0;
    for (const Neighbor &n: g_.neighbors(i))
      sigma += g_.bond(n.bond).order;
    std::vector<int> totals;
    if (pa.bracket) {
      try {
        totals = ValenceTable::defaults().allowed(pa.atom.element,
                                                  pa.atom.charge);
      } catch (const UnknownElementError &) {
        return false;
      }
      std::sort(totals.begin(), totals.end());
    } else {
      auto dv = default_valences(pa.atom.element);
      totals.assign(dv.begin(), dv.end());
    }
    for (int v: totals)
      if (v >= sigma)
        return v - sigma >= 1;
    return false;
  }

  std::vector<int> candidates(int i) const {
    std::vector<int> out;
    for (const Neighbor &n: g_.neighbors(i))
      if (aromatic_bond_[n.bond] && need_[n.atom] && mate_[n.atom] < 0)
        out.push_back(n.atom);
    return out;
  }

  bool match() {
    int best = -1;
    std::size_t best_n = 0;
    for (int i = 0; i < g_.num_atoms(); ++i) {
      if (!need_[i] || mate_[i] >= 0)
        continue;
      const std::size_t n = candidates(i).size();
      if (best < 0 || n < best_n) {
        best = i;
        best_n = n;
      }
      if (n == 0)
        return false;
    }
    if (best < 0)
      return true;
    for (int j: candidates(best)) {
      mate_[best] = j;
      mate_[j] = best;
      if (match())
        return true;
      mate_[best] = mate_[j] = -1;
    }
    return false;
  }

  const MolGraph &g_;
  const std::vector<char> &aromatic_bond_;
  std::vector<char> need_;
  std::vector<int> mate_;
};

struct RingOpen {
  int atom;
  char bond;
  std::size_t offset;
};

} // namespace

MolGraph parse_smiles(std::string_view s) {
  const std::vector<SmilesToken> tokens = lex_smiles(s);

  MolGraph g;
  std::vector<ParsedAtom> atoms;
  std::vector<char> aromatic_bond;
  std::vector<int> branches;
  std::map<int, RingOpen> rings;
  int prev = -1;
  char bond = 0;
  std::size_t bond_offset = 0;

  auto connect = [&](int a, int b, char c, std::size_t offset) {
    if (a == b || g.find_bond(a, b) >= 0)
      throw ParseError(ParseErrorKind::kUnexpectedChar, offset,
                       "duplicate or self bond");
    int order = 1;
    bool arom = false;
    char dir = 0;
    switch (c) {
    case 0:
      arom = atoms[a].aromatic && atoms[b].aromatic;
      break;
    case '-':
      break;
    case '=':
      order = 2;
      break;
    case '#':
      order = 3;
      break;
    case ':':
      arom = true;
      break;
    case '/':
    case '\\':
      dir = c;
      break;
    default:
      throw ParseError(ParseErrorKind::kUnexpectedChar, offset,
                       std::string("unsupported bond '") + c + "'");
    }
    g.add_bond(a, b, order, dir);
    aromatic_bond.push_back(arom ? 1 : 0);
  };

  for (const SmilesToken &tok: tokens) {
    switch (tok.kind) {
    case SmilesTokenKind::kOrganicAtom:
    case SmilesTokenKind::kBracketAtom: {
      ParsedAtom pa = tok.kind == SmilesTokenKind::kBracketAtom
                          ? parse_bracket(tok.lexeme, tok.offset)
                          : parse_organic(tok.lexeme, tok.offset);
      if (pa.atom.map != 0 && g.find_map(pa.atom.map) >= 0)
        throw ParseError(ParseErrorKind::kDuplicateMap, tok.offset,
                         "map number " + std::to_string(pa.atom.map)
                             + " used twice");
      const int idx = g.add_atom(pa.atom);
      atoms.push_back(std::move(pa));
      if (prev >= 0)
        connect(prev, idx, bond, bond_offset);
      else if (bond != 0)
        throw ParseError(ParseErrorKind::kUnexpectedChar, bond_offset,
                         "bond without a preceding atom");
      bond = 0;
      prev = idx;
      break;
    }
    case SmilesTokenKind::kBond:
      if (bond != 0 || prev < 0)
        throw ParseError(ParseErrorKind::kUnexpectedChar, tok.offset,
                         "misplaced bond symbol");
      bond = tok.lexeme[0];
      bond_offset = tok.offset;
      break;
    case SmilesTokenKind::kBranchOpen:
      if (prev < 0 || bond != 0)
        throw ParseError(ParseErrorKind::kUnbalancedBranch, tok.offset,
                         "branch without a preceding atom");
      branches.push_back(prev);
      break;
    case SmilesTokenKind::kBranchClose:
      if (branches.empty() || bond != 0)
        throw ParseError(ParseErrorKind::kUnbalancedBranch, tok.offset,
                         "unmatched ')'");
      prev = branches.back();
      branches.pop_back();
      break;
    case SmilesTokenKind::kRingClosure: {
      if (prev < 0)
        throw ParseError(ParseErrorKind::kUnexpectedChar, tok.offset,
                         "ring closure without an atom");
      const int num = tok.lexeme.size() == 1
                          ? tok.lexeme[0] - '0'
                          : std::stoi(std::string(tok.lexeme.substr(1)));
      auto it = rings.find(num);
      if (it == rings.end()) {
        rings.emplace(num, RingOpen { prev, bond, tok.offset });
      } else {
        const RingOpen open = it->second;
        if (open.bond != 0 && bond != 0 && open.bond != bond
            && !(std::string_view("/\\").find(open.bond) != std::string_view::npos
                 && std::string_view("/\\").find(bond) != std::string_view::npos))
          throw ParseError(ParseErrorKind::kUnexpectedChar, tok.offset,
                           "conflicting ring bond symbols");
        rings.erase(it);
        connect(open.atom, prev, bond != 0 ? bond : open.bond, tok.offset);
      }
      bond = 0;
      break;
    }
    case SmilesTokenKind::kDot:
      if (bond != 0)
        throw ParseError(ParseErrorKind::kUnexpectedChar, tok.offset,
                         "bond before '.'");
      prev = -1;
      break;
    }
  }
  if (!rings.empty())
    throw ParseError(ParseErrorKind::kUnclosedRing,
                     rings.begin()->second.offset,
                     "ring " + std::to_string(rings.begin()->first)
                         + " never closed");
  if (!branches.empty())
    throw ParseError(ParseErrorKind::kUnbalancedBranch, s.size(),
                     "unclosed '('");
  if (bond != 0)
    throw ParseError(ParseErrorKind::kUnexpectedChar, bond_offset,
                     "dangling bond symbol");

  if (std::any_of(atoms.begin(), atoms.end(),
                  [](const ParsedAtom &a) { return a.aromatic; })) {
    Kekulizer k(g, atoms, aromatic_bond);
    if (!k.solve()) {
      const int bad = std::max(k.first_unmatched(), 0);
      throw ParseError(ParseErrorKind::kKekulization, atoms[bad].offset,
                       "no alternating bond assignment for aromatic system");
    }
    for (int b: k.doubles())
      g.set_bond_order(g.bond(b).a, g.bond(b).b, 2);
  }

  for (int i = 0; i < g.num_atoms(); ++i)
    if (!atoms[i].bracket)
      g.set_hcount(i, default_implicit_hydrogens(g.atom(i).element,
                                                 g.valence(i)));
  return g;
}

} // namespace mech
