#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gom/factory.hpp"
#include "gom/strategy.hpp"

namespace gom::bv {

enum class Rule { AiDown, SwitchLeft, SwitchRight, QDown };

std::string_view to_string(Rule rule);
std::optional<Rule> rule_from_string(std::string_view name);

/// A rule instance applied at `position`; `result` is the whole rewritten term.
struct Successor {
  Rule rule;
  Position position;
  NodeRef result;

  friend auto operator<=>(const Successor&, const Successor&) = default;
};

struct ProofStep {
  Rule rule;
  Position position;
  NodeRef before;
  NodeRef after;
};

enum class ProofStatus { Proved, NotProvedWithinBounds, RefutedByExhaustion };

struct ProofTrace {
  NodeRef goal;
  std::vector<ProofStep> steps;
  ProofStatus status = ProofStatus::NotProvedWithinBounds;
  std::size_t states_discovered = 0;
  std::size_t states_expanded = 0;
};

enum class SearchOrder { BreadthFirst, DepthFirst };

struct SearchConfig {
  std::size_t max_depth = 20;
  /// Cap on the number of distinct states discovered.
  std::size_t max_frontier = 100'000;
  bool can_react_pruning = true;
  SearchOrder order = SearchOrder::BreadthFirst;
  /// Identity-based visited set. Turning it off is only useful for measuring
  /// what sharing buys; the search then relies on max_depth to terminate.
  bool deduplicate = true;
};

/// Proof search for system BV over canonical structures built by a factory
/// for the Struct signature (o, neg, par/cop/seq over concPar/concCop/concSeq;
/// every other constant of sort Struc is an atom).
class Prover {
 public:
  explicit Prover(const Factory& factory);

  std::vector<Successor> apply_ai_down(NodeRef t) const;
  std::vector<Successor> apply_switch(NodeRef t, bool pruning = true) const;
  std::vector<Successor> apply_q_down(NodeRef t) const;
  /// Union of the three rule sets.
  std::vector<Successor> successors(NodeRef t, bool pruning = true) const;

  /// Dual-atom overlap heuristic: true iff some literal of `part` has its
  /// dual somewhere in `u`. Always true with pruning off.
  bool can_react(std::span<const NodeRef> part, NodeRef u, bool pruning = true) const;

  /// Throws Error(InvalidGoalSort) unless `goal` has sort Struc.
  ProofTrace prove(NodeRef goal, const SearchConfig& config = {}) const;

  /// Re-applies the named rule to `before` and looks for (position, after).
  bool check_step(const ProofStep& step) const;

  /// One line per step (`rule @ position : before ==> after`) followed by
  /// the verdict line.
  std::string format_trace(const ProofTrace& trace) const;

  bool is_atom(NodeRef t) const;
  NodeRef unit() const { return unit_; }
  const Factory& factory() const { return factory_; }

 private:
  std::vector<Successor> apply_rule(Rule rule, NodeRef t, bool pruning) const;
  std::vector<std::pair<NodeRef, NodeRef>> seq_splits(NodeRef x) const;

  const Factory& factory_;
  const TermStore& store_;
  OpId o_, neg_, par_, cop_, seq_, conc_par_, conc_cop_, conc_seq_;
  SortId struc_;
  NodeRef unit_;
  Pattern pair_lhs_;       // par list with two distinguished elements x, y
  Pattern ai_rhs_;
  Pattern switch_lhs_[2];  // cop before U, and U before cop
  Pattern switch_rhs_[2];  // left, right
  Pattern q_rhs_;
};

/// First violated canonical-form clause of a Struct term, or nullopt:
/// unit-free lists, flattened lists, sorted par/cop lists, and no par/cop/seq
/// wrapping an empty or singleton list.
std::optional<std::string> struct_canonical_violation(const Factory& factory, NodeRef t);

}  // namespace gom::bv
