// Generators and independent reference implementations shared by the unit
// suites and the acceptance runner. Nothing here uses the matcher, the hook
// engine or the prover; the oracles work on plain trees and strings.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gom/factory.hpp"
#include "gom/parser.hpp"
#include "gom/strategy.hpp"

namespace gom::test {

using Rng = std::mt19937_64;

/// Parses, validates and instantiates an embedded corpus module.
Runtime load_builtin(std::string_view name, FactoryConfig config = {});

/// The Boolean module with every hook removed, sharing `hooked`'s store.
std::unique_ptr<Factory> hook_free_boolean(const Runtime& hooked);

// ---------------------------------------------------------------------------
// Boolean terms

SurfaceTerm random_bool(Rng& rng, int depth);
bool eval_bool(const SurfaceTerm& t);
/// Describes the first subterm that is not in negation normal form.
std::optional<std::string> de_morgan_violation(const TermStore& store, NodeRef t);

/// The oriented De Morgan system as a choice of three rules, instantiating
/// through `factory` (normally a hook-free one).
Strategy de_morgan_rules(const Factory& factory);

// ---------------------------------------------------------------------------
// Struct terms

/// Random structure over atoms a..d, negation on atoms only, with units and
/// nested connectives of 0 to 3 elements.
SurfaceTerm random_struct(Rng& rng, int depth);

/// Canonical printed form computed directly on the surface tree: flatten,
/// drop units, sort par and copar lists by printed form, collapse empty and
/// singleton connectives.
std::string reference_canonical(const SurfaceTerm& t);

// ---------------------------------------------------------------------------
// List matching

/// One item of a flat list pattern over constants: a constant name, `_`, a
/// term variable (lowercase) or a star variable (`X*`).
using ListPattern = std::vector<std::string>;

/// Every list pattern up to `max_len` items over constants {a,b,c}, the
/// wildcard, term variables x,y and star variables X*,Y*,Z*, with variables
/// named in order of first occurrence.
std::vector<ListPattern> all_list_patterns(std::size_t max_len);

/// All solutions of matching `p` against `subject`, each rendered like
/// Substitution::to_string, in order of the star lengths read left to right
/// as a lexicographic tuple.
std::vector<std::string> segment_oracle(const ListPattern& p, const std::vector<std::string>& subject);

// ---------------------------------------------------------------------------
// BV proof search on plain trees

enum class RefVerdict { Proved, Refuted, Bound };

struct RefSearchResult {
  RefVerdict verdict;
  std::size_t states;
};

/// Breadth-first search from `goal` (surface syntax of the Struct module)
/// towards the unit using ai, switch (any split of a copar into two
/// non-empty parts) and q at every position.
RefSearchResult reference_prove(const SurfaceTerm& goal, std::size_t max_depth, bool pruning,
                                std::size_t max_states = 200'000);

}  // namespace gom::test
