#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gom/ids.hpp"
#include "gom/signature.hpp"

namespace gom {

class TermStore;
class Factory;

/// Resolved pattern over one signature. Also used as a right-hand-side
/// template, where a star child splices a bound sublist (or the children of
/// a bound list node) into a variadic argument list.
class Pattern {
 public:
  enum class Kind { Wildcard, Variable, StarVariable, Operator };

  static Pattern wildcard() { return Pattern(Kind::Wildcard, {}, OpId{}, {}); }
  static Pattern variable(std::string name) { return Pattern(Kind::Variable, std::move(name), OpId{}, {}); }
  static Pattern star(std::string name) { return Pattern(Kind::StarVariable, std::move(name), OpId{}, {}); }
  static Pattern apply(OpId op, std::vector<Pattern> children) {
    return Pattern(Kind::Operator, {}, op, std::move(children));
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  OpId op() const { return op_; }
  const std::vector<Pattern>& children() const { return children_; }

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  Pattern(Kind kind, std::string name, OpId op, std::vector<Pattern> children)
      : kind_(kind), name_(std::move(name)), op_(op), children_(std::move(children)) {}

  Kind kind_;
  std::string name_;
  OpId op_;
  std::vector<Pattern> children_;
};

/// Resolves names against `sig`: operator names become operator patterns,
/// `_` the wildcard, other names variables. Throws Error with
/// StarOutsideVariadic, ArityMismatch or UnknownOperator (for `x()` where x
/// is not an operator). `star_allowed` admits a top-level star, as in guard
/// arguments.
Pattern compile_pattern(const PatternExpr& expr, const Signature& sig, bool star_allowed = false);

std::string to_string(const Pattern& p, const Signature& sig);

/// Variable bindings. Term variables bind nodes; star variables bind
/// (possibly empty) sublists. Names are stored without the trailing `*`.
class Substitution {
 public:
  struct Entry {
    std::string name;
    bool is_list = false;
    NodeRef term;
    std::vector<NodeRef> list;
    /// Set when `list` is a suffix of this list node's children.
    NodeRef suffix_of;

    friend bool operator==(const Entry& a, const Entry& b) {
      return a.name == b.name && a.is_list == b.is_list && a.term == b.term && a.list == b.list;
    }
  };

  const NodeRef* term(std::string_view name) const;
  const std::vector<NodeRef>* list(std::string_view name) const;
  const Entry* find(std::string_view name) const;

  void bind(std::string name, NodeRef value);
  void bind_list(std::string name, std::vector<NodeRef> values, NodeRef suffix_of = {});

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Drops bindings made after the first `n` (backtracking).
  void truncate(std::size_t n) { entries_.resize(n); }

  /// Entries ordered by name.
  std::vector<Entry> sorted() const;

  /// `name=term` pairs ordered by name, lists as `X*=[t,...,t]`, separated by
  /// single spaces; `{}` when empty.
  std::string to_string(const TermStore& store) const;

  /// Order-insensitive.
  friend bool operator==(const Substitution& a, const Substitution& b);

 private:
  std::vector<Entry> entries_;
};

/// Callback for match enumeration; return false to stop.
using MatchVisitor = std::function<bool(const Substitution&)>;

/// Enumerates the solutions of matching `p` against `subject`, extending
/// `initial`. Star variables take the shortest sublist first, leftmost star
/// first. Returns false iff the visitor stopped the enumeration.
bool for_each_match(const TermStore& store, const Pattern& p, NodeRef subject,
                    const Substitution& initial, const MatchVisitor& visit);

/// Same, for a tuple of patterns matched pointwise against `subjects`.
bool for_each_match(const TermStore& store, std::span<const Pattern> patterns,
                    std::span<const NodeRef> subjects, const Substitution& initial,
                    const MatchVisitor& visit);

std::optional<Substitution> match_one(const TermStore& store, const Pattern& p, NodeRef subject);
std::vector<Substitution> match_all(const TermStore& store, const Pattern& p, NodeRef subject);

/// Instantiates a template through the factory, so the result is canonical.
/// Throws Error(UnboundVariable).
NodeRef apply_substitution(const Factory& factory, const Pattern& tmpl, const Substitution& s);

}  // namespace gom
