#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gom/matcher.hpp"
#include "gom/parser.hpp"
#include "gom/signature.hpp"
#include "gom/term_store.hpp"

namespace gom {

struct FactoryConfig {
  /// Pipeline re-entries allowed per top-level construction before the hook
  /// system is declared divergent.
  std::size_t recursion_budget = 10'000;
};

/// Single entry point for constructing terms of a module. Every construction
/// runs the operator's hooks, so every node handed out is in canonical form:
/// rebuilding its head over its children yields the same node.
///
/// A Factory is immutable after construction and may be shared by threads.
class Factory {
 public:
  /// `module` must be resolved and accepted by validate() (throws
  /// Error(InvalidModule) otherwise). `store` must have been created for an
  /// equal signature and must outlive the factory.
  Factory(std::shared_ptr<const SignatureModule> module, TermStore& store, FactoryConfig config = {});
  ~Factory();

  Factory(const Factory&) = delete;
  Factory& operator=(const Factory&) = delete;

  /// make_before -> make -> make_after for a fixed-arity operator.
  NodeRef build(OpId op, std::span<const NodeRef> args) const;
  NodeRef build(std::string_view op, std::initializer_list<NodeRef> args) const;

  /// make_before_insert -> make_insert -> make_after_insert: adds `element`
  /// in front of `list`, a node of the same variadic operator.
  NodeRef insert(OpId op, NodeRef element, NodeRef list) const;

  /// Right fold of insert() over `elements`, seeded with the empty list.
  NodeRef build_variadic(OpId op, std::span<const NodeRef> elements) const;
  NodeRef build_variadic(std::string_view op, std::initializer_list<NodeRef> elements) const;

  /// Bottom-up construction. Throws UnknownOperator, ArityMismatch,
  /// SortMismatch.
  NodeRef build_surface(const SurfaceTerm& term) const;
  /// parse_term + build_surface.
  NodeRef parse(std::string_view text) const;

  /// The interned empty list of a variadic operator.
  NodeRef empty_list(OpId op) const;

  /// Rebuilds `node`'s head over `children` through the hooks.
  NodeRef rebuild(NodeRef node, std::span<const NodeRef> children) const;

  /// True iff rebuilding `node` over its own children returns `node`.
  bool is_fixpoint(NodeRef node) const;

  OpId op(std::string_view name) const { return signature_->operator_id(name); }

  TermStore& store() const { return *store_; }
  const Signature& signature() const { return *signature_; }
  const SignatureModule& module() const { return *module_; }
  const FactoryConfig& config() const { return config_; }

 private:
  friend NodeRef apply_substitution(const Factory&, const Pattern&, const Substitution&);
  friend class StrategyRunner;

  struct CompiledGuard;
  struct CompiledClause;
  struct HookSet;
  struct Context;

  static CompiledGuard compile_guard(const GuardExpr& g, const Signature& sig, const BuiltinRegistry& reg);

  NodeRef build_in(Context& ctx, OpId op, std::span<const NodeRef> args) const;
  NodeRef insert_in(Context& ctx, OpId op, NodeRef element, NodeRef list) const;
  NodeRef fold_in(Context& ctx, OpId op, std::span<const NodeRef> elements, NodeRef seed) const;
  NodeRef instantiate(Context& ctx, const Pattern& tmpl, const Substitution& s) const;
  NodeRef raw_in_hook(OpId op, std::span<const NodeRef> args) const;

  /// Runs the first firing clause of `clauses` over `args`; nullopt when none
  /// fires. `tuple_out` receives the tuple of a Tuple action.
  std::optional<NodeRef> fire(Context& ctx, OpId op, const std::vector<CompiledClause>& clauses,
                              std::span<const NodeRef> args,
                              std::vector<NodeRef>* tuple_out) const;
  bool eval_guard(Context& ctx, const CompiledGuard& g, const Substitution& s) const;

  void check_arg_sort(OpId op, SortId expected, NodeRef arg) const;
  void check_result_sort(OpId op, NodeRef result) const;

  std::shared_ptr<const SignatureModule> module_;
  std::shared_ptr<const Signature> signature_;
  TermStore* store_;
  FactoryConfig config_;
  std::vector<HookSet> hooks_;  // indexed by OpId
};

/// Convenience bundle: parsed, resolved, validated module with its store and
/// factory.
struct Runtime {
  std::shared_ptr<const SignatureModule> module;
  std::unique_ptr<TermStore> store;
  std::unique_ptr<Factory> factory;
};

/// Parses, resolves against `available`, validates and instantiates.
/// Throws SyntaxError, or Error(InvalidModule) carrying the first diagnostic.
Runtime load_runtime(std::string_view text, std::span<const SignatureModule> available = {},
                     FactoryConfig config = {});

}  // namespace gom
