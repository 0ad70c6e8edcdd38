//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mech/error.h"
#include "mech/mechsmiles.h"
#include "mech/molgraph.h"
#include "mech/smiles.h"
#include "mech/valence.h"

namespace mech {

enum class ApplyErrorKind {
  kMissingMap,
  kNoLonePair,
  kMissingBond,
  kNegativeBondOrder,
  kUnstable,
};

const char *to_string(ApplyErrorKind kind);

class ApplyError: public Error {
public:
  ApplyError(ApplyErrorKind kind, std::optional<Arrow> arrow,
             std::vector<Violation> violations, const std::string &msg)
      : Error(msg), kind_(kind), arrow_(arrow),
        violations_(std::move(violations)) { }

  ApplyErrorKind kind() const noexcept { return kind_; }
  // The offending arrow for precondition failures.
  const std::optional<Arrow> &arrow() const noexcept { return arrow_; }
  // Atoms of the rejected post-state, for kUnstable.
  const std::vector<Violation> &violations() const noexcept {
    return violations_;
  }

private:
  ApplyErrorKind kind_;
  std::optional<Arrow> arrow_;
  std::vector<Violation> violations_;
};

// A multiset of stable components. Every hydrogen is an atom of its own and
// every atom carries a unique map number, which serves as its identity
// across steps.
class State {
public:
  State() = default;

  // Materializes hydrogens and numbers unmapped atoms above the current
  // maximum, in index order. Throws ApplyError(kUnstable) when `check` is set
  // and the graph fails validation.
  static State from_graph(const MolGraph &g, bool check = true,
                          const ValenceTable &table = ValenceTable::defaults());
  static State parse(std::string_view smiles, bool check = true);

  const MolGraph &graph() const noexcept { return graph_; }

  // Map-free canonical SMILES of the whole state.
  const std::string &canonical() const noexcept { return canonical_; }
  // Canonical SMILES per component, sorted.
  std::vector<std::string> species() const;

  std::string smiles(MapMode mode = MapMode::kNone) const {
    return write_smiles(graph_, mode);
  }

  bool operator==(const State &o) const { return canonical_ == o.canonical_; }

private:
  explicit State(MolGraph g);

  MolGraph graph_;
  std::string canonical_;
};

// Applies the arrows atomically, with preconditions checked on `g`. The
// result is not validated.
MolGraph apply_arrows(const MolGraph &g, std::span<const Arrow> arrows);

// apply_arrows followed by validation of the post-state.
State apply_move(const State &s, std::span<const Arrow> arrows,
                 const ValenceTable &table = ValenceTable::defaults());

struct MoveSet {
  // Chain order: each arrow after the first starts at the previous sink.
  std::vector<Arrow> arrows;

  auto operator<=>(const MoveSet &) const = default;
};

struct EnumerateOptions {
  int max_arrows = 4;
  const ValenceTable *table = nullptr; // defaults when null
};

// Every arrow chain of length 1..max_arrows whose preconditions hold on the
// pre-state and whose joint application is stable. Arrow i+1 must be an
// Ionize or BondAttack leaving from the sink of arrow i; partial chains may
// only leave their origin and current sink invalid. Deduplicated by arrow
// multiset and sorted.
std::vector<MoveSet> enumerate_moves(const State &s,
                                     const EnumerateOptions &opts = {});

// Rewrites the arrows of `step` into the map numbers of `s` by locating each
// host component in the state. Mapped host atoms are matched to the same
// map in the state when possible. Throws Error when the host is not part
// of the state.
std::vector<Arrow> resolve_step(const State &s, const MechStep &step);

State apply_step(const State &s, const MechStep &step,
                 const ValenceTable &table = ValenceTable::defaults());

// MechStep hosted on the whole state, for arrows in the state's own map
// numbers. serialize() picks the scope.
MechStep make_step(const State &s, std::vector<Arrow> arrows);

} // namespace mech
