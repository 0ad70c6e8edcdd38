//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "mech/convert.h"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <thread>
#include <variant>

namespace mech {

using nlohmann::json;

Mechanism replay(const State &initial,
                 std::span<const std::vector<Arrow>> arrows) {
  Mechanism m;
  m.initial = initial;
  State cur = initial;
  for (const auto &a: arrows) {
    State next = apply_move(cur, a);
    m.steps.push_back(make_step(cur, a));
    m.intermediates.push_back(next);
    cur = std::move(next);
  }
  return m;
}

Mechanism replay_steps(const State &initial, std::span<const MechStep> steps) {
  std::vector<std::vector<Arrow>> arrows;
  Mechanism m;
  m.initial = initial;
  State cur = initial;
  for (const MechStep &s: steps) {
    std::vector<Arrow> a = resolve_step(cur, s);
    State next = apply_move(cur, a);
    m.steps.push_back(make_step(cur, std::move(a)));
    m.intermediates.push_back(next);
    cur = std::move(next);
  }
  return m;
}

Mechanism segment_arrows(const MolGraph &reactants,
                         std::span<const Arrow> arrows) {
  State cur;
  try {
    cur = State::from_graph(reactants);
  } catch (const ApplyError &e) {
    throw ConvertError("unstable-reactants", e.what());
  }
  Mechanism m;
  m.initial = cur;
  std::size_t i = 0;
  while (i < arrows.size()) {
    bool cut = false;
    std::string last_error;
    for (std::size_t j = i + 1; j <= arrows.size(); ++j) {
      std::vector<Arrow> group(arrows.begin() + i, arrows.begin() + j);
      try {
        State next = apply_move(cur, group);
        m.steps.push_back(make_step(cur, std::move(group)));
        m.intermediates.push_back(next);
        cur = std::move(next);
        i = j;
        cut = true;
        break;
      } catch (const ApplyError &e) {
        if (e.kind() == ApplyErrorKind::kMissingMap)
          throw ConvertError("dangling-map", e.what());
        last_error = e.what();
      }
    }
    if (!cut)
      throw ConvertError("no-stable-prefix",
                         "arrows from position " + std::to_string(i)
                             + " never reach a stable state: " + last_error);
  }
  return m;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(std::string(s.substr(start, p - start)));
    if (p == std::string_view::npos)
      break;
    start = p + 1;
  }
  return out;
}

// Reactant and product sides of a reaction SMILES; agents are dropped.
std::pair<std::string, std::string> reaction_sides(std::string_view rxn) {
  const std::size_t first = rxn.find('>');
  const std::size_t last = rxn.rfind('>');
  if (first == std::string_view::npos || first == last)
    throw ConvertError("malformed-reaction", "expected 'reactants>>products'");
  return { trim(rxn.substr(0, first)), trim(rxn.substr(last + 1)) };
}

int parse_int(const std::string &s, const char *what) {
  const std::string t = trim(s);
  if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit) || t.size() > 9)
    throw ConvertError("malformed-arrowcode",
                       std::string("expected a map number for ") + what
                           + ", got '" + t + "'");
  return std::stoi(t);
}

std::vector<Arrow> parse_arrowcode(std::string_view code) {
  std::vector<Arrow> out;
  for (const std::string &raw: split(code, ';')) {
    const std::string entry = trim(raw);
    if (entry.empty())
      continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw ConvertError("malformed-arrowcode", "entry '" + entry + "' lacks '='");
    const auto lhs = split(entry.substr(0, eq), ',');
    const int c = parse_int(entry.substr(eq + 1), "target");
    if (lhs.size() == 1) {
      const int a = parse_int(lhs[0], "source");
      if (a == c)
        throw ConvertError("malformed-arrowcode", "self attack in '" + entry + "'");
      out.push_back(Arrow::attack(a, c));
    } else if (lhs.size() == 2) {
      const int a = parse_int(lhs[0], "bond"), b = parse_int(lhs[1], "bond");
      if (a == b)
        throw ConvertError("malformed-arrowcode", "degenerate bond in '" + entry + "'");
      if (c == b)
        out.push_back(Arrow::ionize(a, b));
      else if (c == a)
        out.push_back(Arrow::ionize(b, a));
      else
        out.push_back(Arrow::bond_attack(a, b, c));
    } else {
      throw ConvertError("malformed-arrowcode", "entry '" + entry + "' has too many sources");
    }
  }
  return out;
}

// Accepts `(1,2);((2,3),3)` as well as list spellings such as
// `[(1, 2), ((2, 3), 3)]` or `[[1,2],[[2,3],3]]`.
std::string normalize_arrow_list(std::string s) {
  s = trim(s);
  if (s.empty() || s.front() != '[')
    return s;
  if (s.back() != ']')
    throw ConvertError("malformed-arrows", "unterminated arrow list");
  s = s.substr(1, s.size() - 2);
  std::string out;
  int depth = 0;
  for (char ch: s) {
    if (ch == '[')
      ch = '(';
    else if (ch == ']')
      ch = ')';
    if (ch == '(')
      ++depth;
    else if (ch == ')')
      --depth;
    if (ch == ',' && depth == 0)
      out += ';';
    else
      out += ch;
  }
  return out;
}

MolGraph parse_side(const std::string &s) {
  try {
    return parse_smiles(s);
  } catch (const ParseError &e) {
    throw ConvertError("smiles-parse", e.what());
  }
}

struct Line {
  std::size_t number;
  std::string text;
};

struct Group {
  std::string id;
  std::vector<Line> lines;
};

using Outcome = std::variant<Mechanism, json>;

json reject(const Group &g, const std::string &reason, const std::string &msg) {
  json lines = json::array();
  for (const Line &l: g.lines)
    lines.push_back(l.number);
  return { { "reaction_id", g.id }, { "lines", lines }, { "reason", reason },
           { "message", msg } };
}

Mechanism convert_flower(const Group &g) {
  Mechanism m;
  State cur;
  std::vector<std::size_t> source;
  for (std::size_t k = 0; k < g.lines.size(); ++k) {
    const auto fields = split(g.lines[k].text, '\t').size() > 1
                            ? split(g.lines[k].text, '\t')
                            : split(g.lines[k].text, ',');
    const auto [rs, ps] = reaction_sides(fields[0]);
    Inference inf = infer_arrows(parse_side(rs), parse_side(ps));
    if (k == 0) {
      cur = State::from_graph(inf.reactant);
      m.initial = cur;
    }
    std::vector<Arrow> arrows = resolve_step(cur, { inf.reactant, inf.arrows });
    State next = apply_move(cur, arrows);
    if (next.canonical() != canonical_form(parse_side(ps)))
      throw ConvertError("cross-check-mismatch",
                         "replayed state " + next.canonical()
                             + " differs from the recorded products");
    m.steps.push_back(make_step(cur, std::move(arrows)));
    m.intermediates.push_back(next);
    cur = std::move(next);
    source.push_back(fields[0].size());
  }
  m.meta["source_lengths"] = source;
  return m;
}

Mechanism convert_uspto(const Group &g) {
  const std::string &text = g.lines.front().text;
  std::string reactants, arrows;
  const auto tabs = split(text, '\t');
  if (tabs.size() >= 2) {
    reactants = tabs[0];
    arrows = tabs[1];
  } else {
    const std::size_t bar = text.find('|');
    if (bar == std::string::npos)
      throw ConvertError("malformed-record", "expected reactants and arrows");
    reactants = text.substr(0, bar);
    arrows = text.substr(bar + 1);
  }
  std::vector<Arrow> list;
  try {
    list = parse_arrows(normalize_arrow_list(arrows));
  } catch (const ParseError &e) {
    throw ConvertError("malformed-arrows", e.what());
  }
  Mechanism m = segment_arrows(parse_side(trim(reactants)), list);
  m.meta["source_lengths"] = { text.size() };
  return m;
}

Mechanism convert_pmechdb(const Group &g) {
  std::vector<MechStep> steps;
  std::vector<std::size_t> source;
  for (const Line &l: g.lines) {
    steps.push_back(from_smirks_arrowcode(l.text));
    source.push_back(split(l.text, '\t').size() > 1 ? split(l.text, '\t')[0].size()
                                                     : trim(l.text).size());
  }
  State init;
  try {
    init = State::from_graph(steps.front().host);
  } catch (const ApplyError &e) {
    throw ConvertError("unstable-reactants", e.what());
  }
  Mechanism m;
  try {
    m = replay_steps(init, steps);
  } catch (const ApplyError &e) {
    throw ConvertError("replay-failed", e.what());
  } catch (const ConvertError &) {
    throw;
  } catch (const Error &e) {
    throw ConvertError("step-not-in-state", e.what());
  }
  m.meta["source_lengths"] = source;
  return m;
}

Outcome convert_group(const Group &g, SourceFormat f) {
  try {
    Mechanism m;
    switch (f) {
    case SourceFormat::kFlower:
      m = convert_flower(g);
      break;
    case SourceFormat::kMechUspto:
      m = convert_uspto(g);
      break;
    case SourceFormat::kPmechdb:
      m = convert_pmechdb(g);
      break;
    case SourceFormat::kMechsmiles: {
      m = mechanism_from_json(json::parse(g.lines.front().text));
      break;
    }
    }
    if (f != SourceFormat::kMechsmiles) {
      m.reaction_id = g.id;
      m.source_format = to_string(f);
    }
    return m;
  } catch (const ConvertError &e) {
    return reject(g, e.reason(), e.what());
  } catch (const ApplyError &e) {
    return reject(g, to_string(e.kind()), e.what());
  } catch (const ParseError &e) {
    return reject(g, "parse-error", e.what());
  } catch (const json::exception &e) {
    return reject(g, "malformed-json", e.what());
  } catch (const Error &e) {
    return reject(g, "error", e.what());
  }
}

// Optional trailing id column for each format.
std::string record_id(const std::string &text, SourceFormat f) {
  std::vector<std::string> fields = split(text, '\t');
  if (f == SourceFormat::kFlower && fields.size() == 1)
    fields = split(text, ',');
  const std::size_t want = f == SourceFormat::kMechUspto ? 3 : 2;
  return fields.size() >= want ? trim(fields[want - 1]) : std::string();
}

class GroupReader {
public:
  GroupReader(std::istream &in, SourceFormat f): in_(in), f_(f) { }

  std::optional<Group> next() {
    for (;;) {
      std::optional<Line> line = pending_ ? std::move(pending_) : read_line();
      pending_.reset();
      if (!line)
        break;
      const std::string id = record_id(line->text, f_);
      if (!cur_) {
        cur_ = Group { id.empty() ? "line" + std::to_string(line->number) : id,
                       { *line } };
        cur_explicit_ = !id.empty();
        if (f_ == SourceFormat::kMechUspto || f_ == SourceFormat::kMechsmiles
            || (f_ == SourceFormat::kPmechdb && id.empty()))
          return take();
        continue;
      }
      if (continues(*line, id)) {
        cur_->lines.push_back(*line);
        continue;
      }
      pending_ = std::move(line);
      return take();
    }
    if (cur_)
      return take();
    return std::nullopt;
  }

private:
  std::optional<Line> read_line() {
    std::string text;
    while (std::getline(in_, text)) {
      ++number_;
      if (!text.empty() && text.back() == '\r')
        text.pop_back();
      if (trim(text).empty() || text[0] == '#')
        continue;
      return Line { number_, text };
    }
    return std::nullopt;
  }

  bool continues(const Line &line, const std::string &id) {
    if (cur_explicit_ || !id.empty())
      return cur_explicit_ && id == cur_->id;
    if (f_ != SourceFormat::kFlower)
      return false;
    // Without ids, a step continues the group when its reactants equal the
    // previous products.
    try {
      auto fields = split(cur_->lines.back().text, ',');
      const auto prev = reaction_sides(split(fields[0], '\t')[0]);
      fields = split(line.text, ',');
      const auto here = reaction_sides(split(fields[0], '\t')[0]);
      return canonical_form(parse_smiles(prev.second))
             == canonical_form(parse_smiles(here.first));
    } catch (const Error &) {
      return false;
    }
  }

  Group take() {
    Group g = std::move(*cur_);
    cur_.reset();
    return g;
  }

  std::istream &in_;
  SourceFormat f_;
  std::size_t number_ = 0;
  std::optional<Line> pending_;
  std::optional<Group> cur_;
  bool cur_explicit_ = false;
};

} // namespace

MechStep from_smirks_arrowcode(std::string_view line) {
  std::string body = trim(line);
  const auto tabs = split(body, '\t');
  std::string smirks, code;
  if (tabs.size() >= 2) {
    const auto sp = tabs[0].find(' ');
    if (sp != std::string::npos) {
      smirks = trim(tabs[0].substr(0, sp));
      code = trim(tabs[0].substr(sp + 1));
    } else {
      smirks = trim(tabs[0]);
      code = trim(tabs[1]);
    }
  } else {
    const auto sp = body.find_first_of(" ");
    if (sp == std::string::npos)
      throw ConvertError("malformed-record", "expected 'smirks arrowcode'");
    smirks = trim(body.substr(0, sp));
    code = trim(body.substr(sp + 1));
  }
  const auto [rs, ps] = reaction_sides(smirks);
  MechStep step { parse_side(rs), parse_arrowcode(code) };
  for (int m: referenced_maps(step.arrows))
    if (step.host.find_map(m) < 0)
      throw ConvertError("dangling-map", "arrow code references map "
                                             + std::to_string(m)
                                             + " absent from the reactants");
  State s;
  try {
    s = State::from_graph(step.host);
  } catch (const ApplyError &e) {
    throw ConvertError("unstable-reactants", e.what());
  }
  State t;
  try {
    t = apply_move(s, step.arrows);
  } catch (const ApplyError &e) {
    throw ConvertError("apply-failed", e.what());
  }
  // Compared with the record's own map numbers, so degenerate exchanges
  // that only move atom identities are still checked.
  const MolGraph product = parse_side(ps);
  WriteOptions keep;
  keep.maps = MapMode::kMinimal;
  for (const Atom &a: product.atoms())
    if (a.map != 0)
      keep.keep_maps.insert(a.map);
  const std::string expected = write_smiles(product, MapMode::kAll);
  const std::string got = write_smiles(t.graph(), keep);
  if (got != expected)
    throw ConvertError("cross-check-mismatch",
                       "arrows give " + got + " but the record states " + expected);
  return step;
}

std::optional<SourceFormat> parse_source_format(std::string_view name) {
  if (name == "flower")
    return SourceFormat::kFlower;
  if (name == "mech-uspto")
    return SourceFormat::kMechUspto;
  if (name == "pmechdb")
    return SourceFormat::kPmechdb;
  if (name == "mechsmiles")
    return SourceFormat::kMechsmiles;
  return std::nullopt;
}

const char *to_string(SourceFormat f) {
  switch (f) {
  case SourceFormat::kFlower:
    return "flower";
  case SourceFormat::kMechUspto:
    return "mech-uspto";
  case SourceFormat::kPmechdb:
    return "pmechdb";
  case SourceFormat::kMechsmiles:
    return "mechsmiles";
  }
  return "unknown";
}

json to_json(const Mechanism &m) {
  std::set<int> refs;
  for (const MechStep &s: m.steps) {
    const auto r = referenced_maps(s.arrows);
    refs.insert(r.begin(), r.end());
  }
  MolGraph g = m.initial.graph();
  for (int i = 0; i < g.num_atoms(); ++i)
    if (g.atom(i).is_hydrogen() && refs.count(g.atom(i).map) == 0)
      g.set_map(i, 0);
  json steps = json::array();
  for (const MechStep &s: m.steps)
    steps.push_back(serialize(s, Scope::kMinimal));
  json j;
  j["reaction_id"] = m.reaction_id;
  j["initial_smiles"] = write_smiles(g, MapMode::kAll);
  j["steps"] = steps;
  j["source_format"] = m.source_format;
  j["meta"] = m.meta;
  return j;
}

Mechanism mechanism_from_json(const json &j) {
  const State initial = State::parse(j.at("initial_smiles").get<std::string>());
  std::vector<MechStep> steps;
  for (const auto &s: j.at("steps"))
    steps.push_back(parse_mechsmiles(s.get<std::string>()));
  Mechanism m = replay_steps(initial, steps);
  m.reaction_id = j.value("reaction_id", "");
  m.source_format = j.value("source_format", "mechsmiles");
  m.meta = j.value("meta", json::object());
  return m;
}

std::vector<Mechanism> read_mechanisms(std::istream &in) {
  std::vector<Mechanism> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty())
      continue;
    out.push_back(mechanism_from_json(json::parse(line)));
  }
  return out;
}

ConvertSummary convert_stream(std::istream &in, std::ostream &out,
                              std::ostream *rejects,
                              const ConvertOptions &opts) {
  ConvertSummary sum;
  GroupReader reader(in, opts.format);
  const int jobs = std::max(1, opts.jobs);
  for (;;) {
    std::vector<Group> chunk;
    while (chunk.size() < std::max<std::size_t>(1, opts.chunk)) {
      auto g = reader.next();
      if (!g)
        break;
      chunk.push_back(std::move(*g));
    }
    if (chunk.empty())
      break;
    std::vector<std::optional<Outcome>> results(chunk.size());
    std::atomic<std::size_t> cursor { 0 };
    auto work = [&] {
      for (std::size_t i = cursor++; i < chunk.size(); i = cursor++)
        results[i] = convert_group(chunk[i], opts.format);
    };
    if (jobs == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back(work);
      for (auto &t: pool)
        t.join();
    }
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      sum.records += chunk[i].lines.size();
      if (const Mechanism *m = std::get_if<Mechanism>(&*results[i])) {
        ++sum.mechanisms;
        sum.steps += m->steps.size();
        out << to_json(*m).dump() << '\n';
      } else {
        ++sum.rejected_mechanisms;
        sum.rejected_records += chunk[i].lines.size();
        if (rejects != nullptr)
          *rejects << std::get<json>(*results[i]).dump() << '\n';
      }
    }
  }
  return sum;
}

} // namespace mech
