#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "gom/factory.hpp"
#include "gom/matcher.hpp"

namespace gom {

/// Path of child indices from the root; empty for the root itself.
using Position = std::vector<std::uint32_t>;

/// `root` for the empty path, otherwise indices joined by dots (`0.2.1`).
std::string to_string(const Position& pos);

/// Ordered set of nodes; membership is an identity test.
class ResultSink {
 public:
  bool add(NodeRef t);
  bool contains(NodeRef t) const { return seen_.contains(t); }
  const std::vector<NodeRef>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<NodeRef> items_;
  std::unordered_set<NodeRef> seen_;
};

/// One match found by collect_everywhere: the matched subterm, its position
/// and the solution. `replace()` returns the whole term with the subterm
/// swapped out, rebuilt through the factory along the spine.
class CollectHit {
 public:
  CollectHit(const Factory& factory, std::span<const NodeRef> spine, const Position& position,
             const Substitution& subst)
      : factory_(factory), spine_(spine), position_(position), subst_(subst) {}

  NodeRef root() const { return spine_.front(); }
  NodeRef subject() const { return spine_.back(); }
  const Position& position() const { return position_; }
  const Substitution& substitution() const { return subst_; }
  const Factory& factory() const { return factory_; }

  NodeRef replace(NodeRef replacement) const;

 private:
  const Factory& factory_;
  std::span<const NodeRef> spine_;  // root .. subject
  const Position& position_;
  const Substitution& subst_;
};

using GuardFn = std::function<bool(const Substitution&)>;
using CollectAction = std::function<void(const CollectHit&, ResultSink&)>;

/// Immutable visitor-combinator tree. Cheap to copy.
class Strategy {
 public:
  enum class Kind {
    Identity,
    Fail,
    Sequence,
    Choice,
    All,
    One,
    Congruence,
    Rule,
    Collect,
    Fix,
    Recurse,
  };

  static Strategy identity();
  static Strategy fail();
  static Strategy sequence(Strategy first, Strategy second);
  static Strategy choice(Strategy first, Strategy second);
  static Strategy all(Strategy s);
  static Strategy one(Strategy s);
  /// Applies `children[i]` to child i; fails on a different head or length.
  static Strategy congruence(OpId op, std::vector<Strategy> children);
  /// Fires iff `lhs` matches at the root (first solution passing `guard`).
  static Strategy rule(Pattern lhs, Pattern rhs, GuardFn guard = {});
  /// Runs `action` for every solution of `pattern` passing `guard`. Applied
  /// directly it behaves as identity; use collect_everywhere.
  static Strategy collect(Pattern pattern, GuardFn guard, CollectAction action);
  /// Recursive strategy: `body` receives a reference to the result.
  static Strategy fix(const std::function<Strategy(const Strategy& self)>& body);

  Kind kind() const;

  struct Node;

 private:
  explicit Strategy(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend class StrategyRunner;
  friend ResultSink& collect_everywhere(const Strategy&, NodeRef, const Factory&, ResultSink&);

  std::shared_ptr<const Node> node_;
  const Node* target_ = nullptr;  // Recurse only; the enclosing Fix node
};

Strategy try_(Strategy s);
Strategy top_down(Strategy s);
Strategy bottom_up(Strategy s);
/// Rewrites until `s` applies nowhere.
Strategy innermost(Strategy s);

struct ApplyConfig {
  std::size_t step_budget = 1'000'000;  // rule firings
};

/// nullopt on failure. Throws Error(StepBudgetExceeded).
std::optional<NodeRef> apply(const Strategy& s, NodeRef t, const Factory& factory,
                             ApplyConfig config = {});

/// Visits every position of `t` in pre-order and runs the collect strategy
/// `c` at each.
ResultSink& collect_everywhere(const Strategy& c, NodeRef t, const Factory& factory, ResultSink& sink);

/// Every position of `t` in pre-order, with its subterm.
void for_each_position(const TermStore& store, NodeRef t,
                       const std::function<void(const Position&, NodeRef)>& visit);

/// The subterm at `pos`.
NodeRef subterm_at(const TermStore& store, NodeRef t, const Position& pos);

}  // namespace gom
