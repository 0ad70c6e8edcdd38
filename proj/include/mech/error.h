//
// mechsmiles - Copyright 2026 The mechsmiles Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mech {

class Error: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  kUnexpectedChar,
  kUnbalancedBracket,
  kUnbalancedBranch,
  kUnclosedRing,
  kUnknownElement,
  kDuplicateMap,
  kKekulization,
  kMissingSeparator,
  kMalformedArrow,
  kDanglingMap,
};

const char *to_string(ParseErrorKind kind);

// Carries the byte offset into the input where parsing stopped.
class ParseError: public Error {
public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string &msg)
      : Error(std::string(to_string(kind)) + " at offset "
              + std::to_string(offset) + ": " + msg),
        kind_(kind), offset_(offset) { }

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

class UnknownElementError: public Error {
public:
  explicit UnknownElementError(std::string symbol)
      : Error("no valence data for element '" + symbol + "'"),
        symbol_(std::move(symbol)) { }

  const std::string &symbol() const noexcept { return symbol_; }

private:
  std::string symbol_;
};

} // namespace mech
