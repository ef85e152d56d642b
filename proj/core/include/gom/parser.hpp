#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gom/error.hpp"
#include "gom/signature.hpp"

namespace gom {

class Pattern;

/// Syntax tree of a term as typed by a user; neither sorted nor interned.
struct SurfaceTerm {
  std::string head;
  std::vector<SurfaceTerm> children;
  SourcePos pos;

  friend bool operator==(const SurfaceTerm& a, const SurfaceTerm& b) {
    return a.head == b.head && a.children == b.children;
  }
};

/// Parses a module: the core signature grammar, operator hooks with rule
/// clauses, and `factory { ... }` blocks. Throws SyntaxError. The result is
/// unresolved and unvalidated.
SignatureModule parse_module(std::string_view text);

/// Parses `head(arg, ..., arg)`; constants may be written with or without
/// `()`. Arity and sorts are not checked here. Throws SyntaxError.
SurfaceTerm parse_term(std::string_view text);

/// Parses a pattern and resolves operator names against `sig`. Throws
/// SyntaxError, or Error(StarOutsideVariadic / ArityMismatch).
Pattern parse_pattern(std::string_view text, const Signature& sig);

/// Parses a pattern without resolving names (the form stored in hooks).
PatternExpr parse_pattern_expr(std::string_view text);

std::string to_string(const SurfaceTerm& term);

}  // namespace gom
