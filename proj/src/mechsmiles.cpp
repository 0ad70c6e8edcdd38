//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/mechsmiles.h"

#include <cctype>
#include <cmath>

#include "mech/error.h"
#include "mech/smiles.h"

namespace mech {

std::string Arrow::to_string() const {
  const std::string sa = std::to_string(a), sb = std::to_string(b);
  switch (kind) {
  case ArrowKind::kAttack:
    return "(" + sa + "," + sb + ")";
  case ArrowKind::kIonize:
    return "((" + sa + "," + sb + ")," + sb + ")";
  case ArrowKind::kBondAttack:
    return "((" + sa + "," + sb + ")," + std::to_string(c) + ")";
  }
  return {};
}

std::string format_arrows(std::span<const Arrow> arrows) {
  std::string out;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    if (i > 0)
      out += ';';
    out += arrows[i].to_string();
  }
  return out;
}

namespace {

class ArrowReader {
public:
  ArrowReader(std::string_view s, std::size_t base): s_(s), base_(base) { }

  std::vector<Arrow> read_all() {
    std::vector<Arrow> out;
    skip();
    if (pos_ == s_.size())
      return out;
    for (;;) {
      out.push_back(read_arrow());
      skip();
      if (pos_ == s_.size())
        break;
      expect(';');
    }
    return out;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(ParseErrorKind::kMalformedArrow, base_ + pos_, msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  int number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_ || pos_ - start > 9)
      fail("expected a map number");
    const int v = std::stoi(std::string(s_.substr(start, pos_ - start)));
    if (v == 0) {
      pos_ = start;
      fail("map numbers start at 1");
    }
    return v;
  }

  Arrow read_arrow() {
    const std::size_t start = pos_;
    expect('(');
    Arrow arrow;
    if (peek('(')) {
      expect('(');
      const int a = number();
      expect(',');
      const int b = number();
      expect(')');
      expect(',');
      const int c = number();
      expect(')');
      if (a == b) {
        pos_ = start;
        fail("bond endpoints must differ");
      }
      if (c == b)
        arrow = Arrow::ionize(a, b);
      else if (c == a)
        arrow = Arrow::ionize(b, a);
      else
        arrow = Arrow::bond_attack(a, b, c);
    } else {
      const int a = number();
      expect(',');
      const int b = number();
      expect(')');
      if (a == b) {
        pos_ = start;
        fail("an atom cannot attack itself");
      }
      arrow = Arrow::attack(a, b);
    }
    return arrow;
  }

  std::string_view s_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

} // namespace

std::vector<Arrow> parse_arrows(std::string_view s, std::size_t base) {
  return ArrowReader(s, base).read_all();
}

std::set<int> referenced_maps(std::span<const Arrow> arrows) {
  std::set<int> out;
  for (const Arrow &x: arrows) {
    out.insert(x.a);
    out.insert(x.b);
    if (x.kind == ArrowKind::kBondAttack)
      out.insert(x.c);
  }
  return out;
}

MechStep parse_mechsmiles(std::string_view s) {
  const std::size_t bar = s.find('|');
  if (bar == std::string_view::npos)
    throw ParseError(ParseErrorKind::kMissingSeparator, s.size(),
                     "expected '|' between SMILES and arrows");
  MechStep step;
  step.host = parse_smiles(s.substr(0, bar));
  step.arrows = parse_arrows(s.substr(bar + 1), bar + 1);
  for (int m: referenced_maps(step.arrows)) {
    if (step.host.find_map(m) < 0) {
      const std::string needle = std::to_string(m);
      std::size_t off = bar + 1;
      // Point at the first mention of the missing number.
      for (std::size_t p = s.find(needle, bar + 1); p != std::string_view::npos;
           p = s.find(needle, p + 1)) {
        const bool left = !std::isdigit(static_cast<unsigned char>(s[p - 1]));
        const bool right = p + needle.size() >= s.size()
                           || !std::isdigit(static_cast<unsigned char>(
                               s[p + needle.size()]));
        if (left && right) {
          off = p;
          break;
        }
      }
      throw ParseError(ParseErrorKind::kDanglingMap, off,
                       "arrow references map " + needle
                           + " which is not in the SMILES");
    }
  }
  return step;
}

bool MechStep::is_minimal() const {
  const std::set<int> refs = referenced_maps(arrows);
  for (const auto &comp: components(host)) {
    bool touched = false;
    for (int i: comp)
      touched |= refs.count(host.atom(i).map) > 0;
    if (!touched)
      return false;
  }
  return true;
}

MolGraph minimal_host(const MolGraph &host, std::span<const Arrow> arrows) {
  const std::set<int> refs = referenced_maps(arrows);
  std::vector<int> keep;
  for (const auto &comp: components(host)) {
    bool touched = false;
    for (int i: comp)
      touched |= refs.count(host.atom(i).map) > 0;
    if (touched)
      keep.insert(keep.end(), comp.begin(), comp.end());
  }
  return subgraph(host, keep);
}

std::string serialize(const MechStep &step, Scope scope) {
  WriteOptions opts;
  opts.maps = MapMode::kMinimal;
  opts.keep_maps = referenced_maps(step.arrows);
  const std::string smiles =
      scope == Scope::kMinimal
          ? write_smiles(minimal_host(step.host, step.arrows), opts)
          : write_smiles(step.host, opts);
  return smiles + "|" + format_arrows(step.arrows);
}

LengthStats length_stats(std::span<const std::size_t> lengths) {
  LengthStats st;
  st.count = lengths.size();
  if (lengths.empty())
    return st;
  double sum = 0;
  for (std::size_t l: lengths)
    sum += static_cast<double>(l);
  st.mean = sum / static_cast<double>(lengths.size());
  double sq = 0;
  for (std::size_t l: lengths)
    sq += (static_cast<double>(l) - st.mean) * (static_cast<double>(l) - st.mean);
  st.stddev = std::sqrt(sq / static_cast<double>(lengths.size()));
  return st;
}

CharStats char_stats(std::span<const MechStep> steps,
                     std::span<const std::string> sources) {
  if (steps.empty())
    throw Error("char_stats: empty corpus");
  if (!sources.empty() && sources.size() != steps.size())
    throw Error("char_stats: source list does not match the step list");
  std::vector<std::size_t> minimal, equilibrated, source;
  for (const MechStep &s: steps) {
    minimal.push_back(serialize(s, Scope::kMinimal).size());
    equilibrated.push_back(serialize(s, Scope::kEquilibrated).size());
  }
  for (const std::string &s: sources)
    source.push_back(s.size());
  CharStats out;
  out.minimal = length_stats(minimal);
  out.equilibrated = length_stats(equilibrated);
  if (!sources.empty())
    out.source = length_stats(source);
  return out;
}

} // namespace mech
