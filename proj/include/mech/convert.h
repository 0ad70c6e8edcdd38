//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mech/engine.h"

namespace mech {

// Ordered elementary steps from an initial state. Step hosts are the full
// state before the step, and arrows use the state's map numbers.
struct Mechanism {
  std::string reaction_id;
  std::string source_format;
  State initial;
  std::vector<MechStep> steps;
  // intermediates[k] is the state after step k; the last one is the goal.
  std::vector<State> intermediates;
  nlohmann::json meta = nlohmann::json::object();

  const State &goal() const {
    return intermediates.empty() ? initial : intermediates.back();
  }
  // State before step k.
  const State &before(std::size_t k) const {
    return k == 0 ? initial : intermediates[k - 1];
  }
};

// Replays arrow sets given in the initial state's numbering.
Mechanism replay(const State &initial,
                 std::span<const std::vector<Arrow>> arrows);

// Replays MechSteps written in any numbering (each host is located in the
// current state).
Mechanism replay_steps(const State &initial, std::span<const MechStep> steps);

class ConvertError: public Error {
public:
  ConvertError(std::string reason, const std::string &msg)
      : Error(msg), reason_(std::move(reason)) { }

  // Short machine-readable tag, e.g. "no-arrow-set".
  const std::string &reason() const noexcept { return reason_; }

private:
  std::string reason_;
};

struct InferOptions {
  int max_arrows = 6;
  // Cap on hydrogen assignments tried when hydrogens are implicit.
  int max_assignments = 720;
};

struct Inference {
  // Reactant with every hydrogen explicit and mapped; arrows refer to it.
  MolGraph reactant;
  std::vector<Arrow> arrows;
};

// Smallest arrow set turning `reactant` into `product`, where both carry
// the same map numbers on heavy atoms (and on any explicit hydrogen).
// Among minimal sets the lexicographically smallest wins; it is returned in
// chain order. Throws ConvertError when no set within the bound exists.
Inference infer_arrows(const MolGraph &reactant, const MolGraph &product,
                       const InferOptions &opts = {});

// Cuts a flat arrow list into elementary steps at the shortest prefixes
// that reach a stable state. Throws ConvertError when a suffix never does.
Mechanism segment_arrows(const MolGraph &reactants, std::span<const Arrow> arrows);

// One PMechDB-style line: `smirks arrowcode[\tid]`. Arrow-code entries are
// `;`-separated: `a=b` attack, `a,b=b` ionize, `a,b=c` bond attack. The
// product side is only used as a cross-check.
MechStep from_smirks_arrowcode(std::string_view line);

enum class SourceFormat {
  kFlower,      // rxn_smiles[,\t id]; one elementary step per line
  kMechUspto,   // reactants<TAB>arrows[<TAB>id] or reactants|arrows
  kPmechdb,     // smirks arrowcode[\tid]
  kMechsmiles,  // unified JSONL records, re-emitted
};

std::optional<SourceFormat> parse_source_format(std::string_view name);
const char *to_string(SourceFormat f);

nlohmann::json to_json(const Mechanism &m);
// Throws Error or ParseError on malformed records.
Mechanism mechanism_from_json(const nlohmann::json &j);

struct ConvertSummary {
  std::size_t records = 0;
  std::size_t mechanisms = 0;
  std::size_t steps = 0;
  std::size_t rejected_records = 0;
  std::size_t rejected_mechanisms = 0;
};

struct ConvertOptions {
  SourceFormat format = SourceFormat::kMechUspto;
  int jobs = 1;
  std::size_t chunk = 512;
};

// Streams `in` to unified JSONL on `out`, rejected records to `rejects`
// (one JSON object per line with a reason). Output order follows input
// order for any job count.
ConvertSummary convert_stream(std::istream &in, std::ostream &out,
                              std::ostream *rejects, const ConvertOptions &opts);

// Reads unified JSONL records, skipping blank lines.
std::vector<Mechanism> read_mechanisms(std::istream &in);

} // namespace mech
