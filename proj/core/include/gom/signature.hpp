#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gom/error.hpp"
#include "gom/ids.hpp"

namespace gom {

class TermStore;

// ---------------------------------------------------------------------------
// Declarations, as written in a .gom file.

struct SortDecl {
  std::string name;
  SourcePos pos;

  friend bool operator==(const SortDecl&, const SortDecl&) = default;
};

struct Slot {
  std::string name;
  std::string sort;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct FixedArity {
  std::vector<Slot> slots;

  friend bool operator==(const FixedArity&, const FixedArity&) = default;
};

struct Variadic {
  std::string element_sort;

  friend bool operator==(const Variadic&, const Variadic&) = default;
};

struct OperatorDecl {
  std::string name;
  std::variant<FixedArity, Variadic> kind;
  std::string result_sort;
  std::string origin;  // name of the declaring module
  SourcePos pos;

  bool is_variadic() const { return std::holds_alternative<Variadic>(kind); }
  const std::vector<Slot>& slots() const { return std::get<FixedArity>(kind).slots; }
  const std::string& element_sort() const { return std::get<Variadic>(kind).element_sort; }

  friend bool operator==(const OperatorDecl&, const OperatorDecl&) = default;
};

/// Unresolved pattern or template: `f(p, ...)`, `x`, `X*`, `_`. Whether a
/// name denotes an operator or a variable is decided against a signature.
struct PatternExpr {
  std::string name;  // "_" for the wildcard
  bool star = false;
  bool call = false;  // written with parentheses
  std::vector<PatternExpr> args;
  SourcePos pos;

  friend bool operator==(const PatternExpr&, const PatternExpr&) = default;
};

enum class GuardOp { Predicate, Not, And };

/// `where` condition of a rule clause. Builtin predicates are lt, leq, gt,
/// geq, is_empty and non_empty; any other name is looked up in the module's
/// BuiltinRegistry.
struct GuardExpr {
  GuardOp op = GuardOp::Predicate;
  std::string predicate;
  std::vector<PatternExpr> args;
  std::vector<GuardExpr> operands;  // Not: one, And: two or more
  SourcePos pos;

  friend bool operator==(const GuardExpr&, const GuardExpr&) = default;
};

enum class ActionKind {
  Build,  // `-> template`: built through the factory
  Raw,    // `-> raw(args)`: the operator's default constructor
  Tuple,  // `-> (t, ..., t)`: new argument tuple, make_before hooks only
};

struct ActionExpr {
  ActionKind kind = ActionKind::Build;
  std::vector<PatternExpr> items;
  SourcePos pos;

  friend bool operator==(const ActionExpr&, const ActionExpr&) = default;
};

struct RuleClause {
  std::vector<PatternExpr> patterns;  // one per hook parameter
  std::optional<GuardExpr> guard;
  ActionExpr action;
  SourcePos pos;

  friend bool operator==(const RuleClause&, const RuleClause&) = default;
};

enum class HookKind {
  Make,
  MakeBefore,
  MakeAfter,
  MakeInsert,
  MakeBeforeInsert,
  MakeAfterInsert,
};

std::string_view to_string(HookKind kind);
std::optional<HookKind> hook_kind_from_string(std::string_view text);
bool is_insert_kind(HookKind kind);

struct HookDecl {
  std::string op;
  HookKind kind = HookKind::Make;
  std::vector<std::string> params;
  std::vector<RuleClause> body;
  std::string origin;
  SourcePos pos;

  friend bool operator==(const HookDecl&, const HookDecl&) = default;
};

/// An entry of a `factory { ... }` block: enables a registry builtin by name.
struct BuiltinUse {
  std::string name;
  SourcePos pos;

  friend bool operator==(const BuiltinUse&, const BuiltinUse&) = default;
};

// ---------------------------------------------------------------------------
// Builtins available to hooks in place of host-language factory code.

struct PredicateArg {
  bool is_list = false;
  std::vector<NodeRef> items;  // exactly one item when !is_list
};

using Comparator = std::function<std::strong_ordering(const TermStore&, NodeRef, NodeRef)>;
using Predicate = std::function<bool(const TermStore&, std::span<const PredicateArg>)>;

class BuiltinRegistry {
 public:
  /// Printed-form comparator plus the `dual` and `can_react` predicates.
  static BuiltinRegistry standard();

  const Comparator& comparator() const { return comparator_; }
  const std::string& comparator_name() const { return comparator_name_; }
  void set_comparator(std::string name, Comparator cmp);

  void add_predicate(std::string name, std::size_t arity, Predicate pred);
  const Predicate* predicate(std::string_view name) const;
  std::optional<std::size_t> predicate_arity(std::string_view name) const;

  /// True for the comparator's name and for every registered predicate.
  bool has(std::string_view name) const;

  friend bool operator==(const BuiltinRegistry& a, const BuiltinRegistry& b);

 private:
  struct Entry {
    std::size_t arity;
    Predicate fn;
  };
  std::string comparator_name_;
  Comparator comparator_;
  std::map<std::string, Entry, std::less<>> predicates_;
};

// Registry predicates, exposed for reuse by the prover.
bool is_dual(const TermStore& store, NodeRef x, NodeRef y);
bool can_react_heuristic(const TermStore& store, std::span<const NodeRef> part, NodeRef u);

struct SignatureModule {
  std::string name;
  std::vector<std::string> imports;
  std::vector<SortDecl> sorts;
  std::vector<OperatorDecl> operators;
  std::vector<HookDecl> hooks;
  std::vector<BuiltinUse> factory;
  BuiltinRegistry builtins = BuiltinRegistry::standard();
  SourcePos pos;

  const OperatorDecl* find_operator(std::string_view op) const;
  const SortDecl* find_sort(std::string_view sort) const;

  friend bool operator==(const SignatureModule&, const SignatureModule&) = default;
};

/// Merges every transitively imported module into a copy of `module`.
/// Imported declarations come first, in dependency order.
/// Throws Error with UnknownImport, ImportCycle or NameClash.
SignatureModule resolve_imports(const SignatureModule& module,
                                std::span<const SignatureModule> available);

struct Diagnostic {
  SourcePos pos;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool accepted() const { return diagnostics.empty(); }
  bool has(std::string_view code) const;
};

/// Checks every structural invariant of a resolved module: declared sorts,
/// unique names, hook kinds and arities, variable binding in rule clauses,
/// star placement and builtin names.
ValidationReport validate(const SignatureModule& module);

/// Pretty-prints a module back to .gom source. Parsing the output yields the
/// same module up to source positions.
std::string to_gom_text(const SignatureModule& module);

// ---------------------------------------------------------------------------
// Resolved operator table of an accepted module.

struct OperatorInfo {
  std::string name;
  bool variadic = false;
  std::vector<std::string> slot_names;
  std::vector<SortId> slot_sorts;
  SortId element_sort{};
  SortId result_sort{};

  std::size_t arity() const { return slot_sorts.size(); }
  bool is_constant() const { return !variadic && slot_sorts.empty(); }

  friend bool operator==(const OperatorInfo&, const OperatorInfo&) = default;
};

class Signature {
 public:
  /// `module` must have been accepted by validate().
  explicit Signature(const SignatureModule& module);

  std::optional<OpId> find_operator(std::string_view name) const;
  /// Throws Error(UnknownOperator).
  OpId operator_id(std::string_view name) const;
  const OperatorInfo& info(OpId op) const { return ops_[index_of(op)]; }
  std::size_t operator_count() const { return ops_.size(); }

  std::optional<SortId> find_sort(std::string_view name) const;
  const std::string& sort_name(SortId sort) const { return sorts_[index_of(sort)]; }
  std::size_t sort_count() const { return sorts_.size(); }

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.sorts_ == b.sorts_ && a.ops_ == b.ops_;
  }

 private:
  std::vector<std::string> sorts_;
  std::vector<OperatorInfo> ops_;
  std::unordered_map<std::string, OpId> op_index_;
  std::unordered_map<std::string, SortId> sort_index_;
};

}  // namespace gom
