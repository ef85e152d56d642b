#include "gom/factory.hpp"

#include <pthread.h>

#include <array>
#include <exception>
#include <functional>

namespace gom {

namespace {

enum class Builtin { Lt, Leq, Gt, Geq, IsEmpty, NonEmpty, Registry };

Builtin builtin_of(std::string_view name) {
  if (name == "lt") return Builtin::Lt;
  if (name == "leq") return Builtin::Leq;
  if (name == "gt") return Builtin::Gt;
  if (name == "geq") return Builtin::Geq;
  if (name == "is_empty") return Builtin::IsEmpty;
  if (name == "non_empty") return Builtin::NonEmpty;
  return Builtin::Registry;
}

constexpr std::size_t kHookKinds = 6;

// A nested hook call costs a few kilobytes of stack. Every kHopEvery levels
// the rest of the computation moves to a thread with a fresh stack, so a full
// recursion budget cannot overflow the caller's stack.
constexpr std::size_t kHopEvery = 512;
constexpr std::size_t kHopStackBytes = std::size_t{16} << 20;

NodeRef on_fresh_stack(const std::function<NodeRef()>& body) {
  struct Job {
    const std::function<NodeRef()>* body;
    NodeRef result{};
    std::exception_ptr error;
  } job{&body, {}, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kHopStackBytes);
  pthread_t thread;
  const int rc = pthread_create(
      &thread, &attr,
      [](void* p) -> void* {
        auto* j = static_cast<Job*>(p);
        try {
          j->result = (*j->body)();
        } catch (...) {
          j->error = std::current_exception();
        }
        return nullptr;
      },
      &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) return body();
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
  return job.result;
}

std::string format_diagnostic(const Diagnostic& d) {
  return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.code + ": " + d.message;
}

}  // namespace

struct Factory::CompiledGuard {
  GuardOp op = GuardOp::Predicate;
  Builtin builtin = Builtin::Registry;
  const Predicate* predicate = nullptr;
  std::vector<Pattern> args;
  std::vector<CompiledGuard> operands;
};

struct Factory::CompiledClause {
  std::vector<Pattern> patterns;
  std::optional<CompiledGuard> guard;
  ActionKind kind = ActionKind::Build;
  std::vector<Pattern> items;
};

struct Factory::HookSet {
  std::array<bool, kHookKinds> present{};
  std::array<std::vector<std::string>, kHookKinds> params;
  std::array<std::vector<CompiledClause>, kHookKinds> clauses;

  bool has(HookKind k) const { return present[static_cast<std::size_t>(k)]; }
  const std::vector<std::string>& params_of(HookKind k) const { return params[static_cast<std::size_t>(k)]; }
  const std::vector<CompiledClause>& clauses_of(HookKind k) const {
    return clauses[static_cast<std::size_t>(k)];
  }
};

struct Factory::Context {
  std::size_t entries = 0;
  std::size_t budget = 0;
  // Parameters of the hook currently firing; bound in every clause.
  const std::vector<std::string>* params = nullptr;
  std::size_t depth = 0;

  struct Nest {
    Context& ctx;
    explicit Nest(Context& c) : ctx(c) { ++ctx.depth; }
    ~Nest() { --ctx.depth; }
    Nest(const Nest&) = delete;
    Nest& operator=(const Nest&) = delete;
    bool hop() const { return ctx.depth % kHopEvery == 0; }
  };

  void enter() {
    if (++entries > budget) {
      throw Error(ErrorCode::RecursionBudgetExceeded,
                  "hook recursion exceeded " + std::to_string(budget) + " re-entries");
    }
  }
};

Factory::Factory(std::shared_ptr<const SignatureModule> module, TermStore& store, FactoryConfig config)
    : module_(std::move(module)), store_(&store), config_(config) {
  const ValidationReport report = validate(*module_);
  if (!report.accepted()) {
    throw Error(ErrorCode::InvalidModule, format_diagnostic(report.diagnostics.front()));
  }
  if (!(Signature(*module_) == store.signature())) {
    throw Error(ErrorCode::StoreMismatch, "store was created for a different signature");
  }
  signature_ = store.shared_signature();

  hooks_.resize(signature_->operator_count());
  for (const HookDecl& hook : module_->hooks) {
    const OpId op = signature_->operator_id(hook.op);
    const auto k = static_cast<std::size_t>(hook.kind);
    HookSet& set = hooks_[index_of(op)];
    set.present[k] = true;
    set.params[k] = hook.params;
    for (const RuleClause& clause : hook.body) {
      CompiledClause c;
      for (const auto& p : clause.patterns) c.patterns.push_back(compile_pattern(p, *signature_));
      if (clause.guard) c.guard = compile_guard(*clause.guard, *signature_, module_->builtins);
      c.kind = clause.action.kind;
      for (const auto& item : clause.action.items) c.items.push_back(compile_pattern(item, *signature_));
      set.clauses[k].push_back(std::move(c));
    }
  }
}

Factory::CompiledGuard Factory::compile_guard(const GuardExpr& g, const Signature& sig,
                                              const BuiltinRegistry& reg) {
  CompiledGuard out;
  out.op = g.op;
  if (g.op == GuardOp::Predicate) {
    out.builtin = builtin_of(g.predicate);
    if (out.builtin == Builtin::Registry) out.predicate = reg.predicate(g.predicate);
    for (const auto& a : g.args) out.args.push_back(compile_pattern(a, sig, true));
  }
  for (const auto& o : g.operands) out.operands.push_back(compile_guard(o, sig, reg));
  return out;
}

Factory::~Factory() = default;

// ---------------------------------------------------------------------------
// Public entry points

NodeRef Factory::build(OpId op, std::span<const NodeRef> args) const {
  Context ctx{0, config_.recursion_budget, nullptr, 0};
  return build_in(ctx, op, args);
}

NodeRef Factory::build(std::string_view op, std::initializer_list<NodeRef> args) const {
  return build(this->op(op), std::span<const NodeRef>(args.begin(), args.size()));
}

NodeRef Factory::insert(OpId op, NodeRef element, NodeRef list) const {
  Context ctx{0, config_.recursion_budget, nullptr, 0};
  return insert_in(ctx, op, element, list);
}

NodeRef Factory::build_variadic(OpId op, std::span<const NodeRef> elements) const {
  if (!signature_->info(op).variadic) {
    throw Error(ErrorCode::ArityMismatch, "'" + signature_->info(op).name + "' is not variadic");
  }
  NodeRef acc = empty_list(op);
  for (std::size_t i = elements.size(); i-- > 0;) acc = insert(op, elements[i], acc);
  return acc;
}

NodeRef Factory::build_variadic(std::string_view op, std::initializer_list<NodeRef> elements) const {
  return build_variadic(this->op(op), std::span<const NodeRef>(elements.begin(), elements.size()));
}

NodeRef Factory::build_surface(const SurfaceTerm& term) const {
  auto op = signature_->find_operator(term.head);
  if (!op) throw Error(ErrorCode::UnknownOperator, "unknown operator '" + term.head + "'");
  const OperatorInfo& info = signature_->info(*op);
  if (!info.variadic && term.children.size() != info.arity()) {
    throw Error(ErrorCode::ArityMismatch, "'" + info.name + "' takes " + std::to_string(info.arity()) +
                                              " arguments, got " + std::to_string(term.children.size()));
  }
  std::vector<NodeRef> kids;
  kids.reserve(term.children.size());
  for (const auto& c : term.children) kids.push_back(build_surface(c));
  return info.variadic ? build_variadic(*op, kids) : build(*op, kids);
}

NodeRef Factory::parse(std::string_view text) const { return build_surface(parse_term(text)); }

NodeRef Factory::empty_list(OpId op) const {
  if (!signature_->info(op).variadic) {
    throw Error(ErrorCode::ArityMismatch, "'" + signature_->info(op).name + "' is not variadic");
  }
  return store_->intern(InternKey{}, op, {});
}

NodeRef Factory::rebuild(NodeRef node, std::span<const NodeRef> children) const {
  const OpId op = store_->op_of(node);
  return signature_->info(op).variadic ? build_variadic(op, children) : build(op, children);
}

bool Factory::is_fixpoint(NodeRef node) const { return rebuild(node, store_->children(node)) == node; }

NodeRef apply_substitution(const Factory& factory, const Pattern& tmpl, const Substitution& s) {
  Factory::Context ctx{0, factory.config_.recursion_budget, nullptr, 0};
  return factory.instantiate(ctx, tmpl, s);
}

// ---------------------------------------------------------------------------
// Pipelines

void Factory::check_arg_sort(OpId op, SortId expected, NodeRef arg) const {
  const SortId actual = store_->sort_of(arg);
  if (actual != expected) {
    throw Error(ErrorCode::SortMismatch, "argument of '" + signature_->info(op).name + "' must be " +
                                             signature_->sort_name(expected) + ", got " +
                                             signature_->sort_name(actual));
  }
}

void Factory::check_result_sort(OpId op, NodeRef result) const {
  const OperatorInfo& info = signature_->info(op);
  const SortId actual = store_->sort_of(result);
  if (actual != info.result_sort) {
    throw Error(ErrorCode::SortMismatch, "hook of '" + info.name + "' produced " + signature_->sort_name(actual) +
                                             ", expected " + signature_->sort_name(info.result_sort));
  }
}

NodeRef Factory::build_in(Context& ctx, OpId op, std::span<const NodeRef> args) const {
  const Context::Nest nest(ctx);
  if (nest.hop()) return on_fresh_stack([&] { return build_in(ctx, op, args); });
  const OperatorInfo& info = signature_->info(op);
  if (info.variadic) return fold_in(ctx, op, args, empty_list(op));
  ctx.enter();

  auto check_args = [&](std::span<const NodeRef> xs) {
    if (xs.size() != info.arity()) {
      throw Error(ErrorCode::ArityMismatch, "'" + info.name + "' takes " + std::to_string(info.arity()) +
                                                " arguments, got " + std::to_string(xs.size()));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) check_arg_sort(op, info.slot_sorts[i], xs[i]);
  };
  check_args(args);

  const HookSet& hooks = hooks_[index_of(op)];
  std::vector<NodeRef> cur(args.begin(), args.end());
  if (hooks.has(HookKind::MakeBefore)) {
    std::vector<NodeRef> tuple;
    ctx.params = &hooks.params_of(HookKind::MakeBefore);
    if (fire(ctx, op, hooks.clauses_of(HookKind::MakeBefore), cur, &tuple)) {
      cur = std::move(tuple);
      check_args(cur);
    }
  }

  std::optional<NodeRef> result;
  if (hooks.has(HookKind::Make)) {
    ctx.params = &hooks.params_of(HookKind::Make);
    result = fire(ctx, op, hooks.clauses_of(HookKind::Make), cur, nullptr);
  }
  if (!result) result = raw_in_hook(op, cur);

  // make_after sees the constructed node through its fields, so it only runs
  // when the earlier stages kept the operator.
  if (hooks.has(HookKind::MakeAfter) && store_->op_of(*result) == op) {
    ctx.params = &hooks.params_of(HookKind::MakeAfter);
    const auto fields = store_->children(*result);
    const std::vector<NodeRef> in(fields.begin(), fields.end());
    if (auto after = fire(ctx, op, hooks.clauses_of(HookKind::MakeAfter), in, nullptr)) result = after;
  }
  check_result_sort(op, *result);
  return *result;
}

NodeRef Factory::insert_in(Context& ctx, OpId op, NodeRef element, NodeRef list) const {
  const Context::Nest nest(ctx);
  if (nest.hop()) return on_fresh_stack([&] { return insert_in(ctx, op, element, list); });
  const OperatorInfo& info = signature_->info(op);
  if (!info.variadic) throw Error(ErrorCode::ArityMismatch, "'" + info.name + "' is not variadic");
  ctx.enter();

  auto check_args = [&](std::span<const NodeRef> xs) {
    if (xs.size() != 2) throw Error(ErrorCode::ArityMismatch, "insert takes an element and a list");
    check_arg_sort(op, info.element_sort, xs[0]);
    if (store_->op_of(xs[1]) != op) {
      throw Error(ErrorCode::SortMismatch,
                  "list argument must be a '" + info.name + "' node, got " + store_->print_term(xs[1]));
    }
  };
  std::vector<NodeRef> cur{element, list};
  check_args(cur);

  const HookSet& hooks = hooks_[index_of(op)];
  if (hooks.has(HookKind::MakeBeforeInsert)) {
    std::vector<NodeRef> tuple;
    ctx.params = &hooks.params_of(HookKind::MakeBeforeInsert);
    if (fire(ctx, op, hooks.clauses_of(HookKind::MakeBeforeInsert), cur, &tuple)) {
      cur = std::move(tuple);
      check_args(cur);
    }
  }

  std::optional<NodeRef> result;
  if (hooks.has(HookKind::MakeInsert)) {
    ctx.params = &hooks.params_of(HookKind::MakeInsert);
    result = fire(ctx, op, hooks.clauses_of(HookKind::MakeInsert), cur, nullptr);
  }
  if (!result) result = raw_in_hook(op, cur);

  if (hooks.has(HookKind::MakeAfterInsert) && store_->op_of(*result) == op && !store_->children(*result).empty()) {
    ctx.params = &hooks.params_of(HookKind::MakeAfterInsert);
    const auto items = store_->children(*result);
    const auto rest = items.subspan(1);
    const auto found = store_->find(op, rest);
    const NodeRef in[] = {items[0], found ? *found : store_->intern(InternKey{}, op, rest)};
    if (auto after = fire(ctx, op, hooks.clauses_of(HookKind::MakeAfterInsert), in, nullptr)) result = after;
  }
  check_result_sort(op, *result);
  return *result;
}

NodeRef Factory::fold_in(Context& ctx, OpId op, std::span<const NodeRef> elements, NodeRef seed) const {
  NodeRef acc = seed;
  for (std::size_t i = elements.size(); i-- > 0;) acc = insert_in(ctx, op, elements[i], acc);
  return acc;
}

NodeRef Factory::raw_in_hook(OpId op, std::span<const NodeRef> args) const {
  const OperatorInfo& info = signature_->info(op);
  if (!info.variadic) return store_->intern(InternKey{}, op, args);
  if (args.size() != 2) throw Error(ErrorCode::ArityMismatch, "raw insert takes an element and a list");
  if (store_->op_of(args[1]) != op) {
    throw Error(ErrorCode::SortMismatch,
                "list argument must be a '" + info.name + "' node, got " + store_->print_term(args[1]));
  }
  const auto tail = store_->children(args[1]);
  std::vector<NodeRef> kids;
  kids.reserve(tail.size() + 1);
  kids.push_back(args[0]);
  kids.insert(kids.end(), tail.begin(), tail.end());
  return store_->intern(InternKey{}, op, kids);
}

// ---------------------------------------------------------------------------
// Hook evaluation

std::optional<NodeRef> Factory::fire(Context& ctx, OpId op, const std::vector<CompiledClause>& clauses,
                                     std::span<const NodeRef> args, std::vector<NodeRef>* tuple_out) const {
  const std::vector<std::string> params = *ctx.params;
  Substitution initial;
  for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) initial.bind(params[i], args[i]);

  for (const CompiledClause& clause : clauses) {
    std::optional<NodeRef> out;
    bool fired = false;
    for_each_match(*store_, clause.patterns, args, initial, [&](const Substitution& s) {
      if (clause.guard && !eval_guard(ctx, *clause.guard, s)) return true;
      std::vector<NodeRef> values;
      values.reserve(clause.items.size());
      for (const Pattern& item : clause.items) values.push_back(instantiate(ctx, item, s));
      switch (clause.kind) {
        case ActionKind::Build:
          if (tuple_out) *tuple_out = values;
          out = values.front();
          break;
        case ActionKind::Raw: out = raw_in_hook(op, values); break;
        case ActionKind::Tuple:
          if (tuple_out) *tuple_out = values;
          out = NodeRef{};
          break;
      }
      fired = true;
      return false;
    });
    if (fired) return out;
  }
  return std::nullopt;
}

bool Factory::eval_guard(Context& ctx, const CompiledGuard& g, const Substitution& s) const {
  switch (g.op) {
    case GuardOp::Not: return !eval_guard(ctx, g.operands.front(), s);
    case GuardOp::And:
      for (const auto& o : g.operands) {
        if (!eval_guard(ctx, o, s)) return false;
      }
      return true;
    case GuardOp::Predicate: break;
  }

  // Star arguments: a bound sublist, or the children of a bound list node.
  auto list_arg = [&](const Pattern& p) -> std::vector<NodeRef> {
    if (const auto* l = s.list(p.name())) return *l;
    if (const auto* t = s.term(p.name())) {
      auto kids = store_->children(*t);
      return {kids.begin(), kids.end()};
    }
    throw Error(ErrorCode::UnboundVariable, "unbound variable '" + p.name() + "*'");
  };

  switch (g.builtin) {
    case Builtin::Lt:
    case Builtin::Leq:
    case Builtin::Gt:
    case Builtin::Geq: {
      const NodeRef a = instantiate(ctx, g.args[0], s);
      const NodeRef b = instantiate(ctx, g.args[1], s);
      const std::strong_ordering c = module_->builtins.comparator()(*store_, a, b);
      if (g.builtin == Builtin::Lt) return c < 0;
      if (g.builtin == Builtin::Leq) return c <= 0;
      if (g.builtin == Builtin::Gt) return c > 0;
      return c >= 0;
    }
    case Builtin::IsEmpty: return list_arg(g.args[0]).empty();
    case Builtin::NonEmpty: return !list_arg(g.args[0]).empty();
    case Builtin::Registry: break;
  }

  std::vector<PredicateArg> args;
  args.reserve(g.args.size());
  for (const Pattern& p : g.args) {
    if (p.kind() == Pattern::Kind::StarVariable) {
      args.push_back(PredicateArg{true, list_arg(p)});
    } else {
      args.push_back(PredicateArg{false, {instantiate(ctx, p, s)}});
    }
  }
  return (*g.predicate)(*store_, args);
}

NodeRef Factory::instantiate(Context& ctx, const Pattern& tmpl, const Substitution& s) const {
  switch (tmpl.kind()) {
    case Pattern::Kind::Wildcard:
      throw Error(ErrorCode::UnboundVariable, "'_' cannot be instantiated");
    case Pattern::Kind::StarVariable:
      throw Error(ErrorCode::StarOutsideVariadic, "'" + tmpl.name() + "*' outside a variadic argument list");
    case Pattern::Kind::Variable: {
      if (const NodeRef* t = s.term(tmpl.name())) return *t;
      throw Error(ErrorCode::UnboundVariable, "unbound variable '" + tmpl.name() + "'");
    }
    case Pattern::Kind::Operator: break;
  }

  const OpId op = tmpl.op();
  const OperatorInfo& info = signature_->info(op);
  const auto& kids = tmpl.children();
  if (!info.variadic) {
    std::vector<NodeRef> args;
    args.reserve(kids.size());
    for (const Pattern& k : kids) args.push_back(instantiate(ctx, k, s));
    return build_in(ctx, op, args);
  }

  // A trailing splice of an existing list node of this operator is used as
  // the fold seed instead of being re-folded.
  NodeRef seed{};
  std::size_t splice_end = kids.size();
  if (!kids.empty() && kids.back().kind() == Pattern::Kind::StarVariable) {
    if (const auto* e = s.find(kids.back().name())) {
      if (!e->is_list && store_->op_of(e->term) == op) {
        seed = e->term;
      } else if (e->is_list && e->suffix_of.valid() && store_->op_of(e->suffix_of) == op) {
        if (auto node = store_->find(op, e->list)) seed = *node;
      }
    }
    if (seed.valid()) --splice_end;
  }
  if (!seed.valid()) seed = empty_list(op);

  std::vector<NodeRef> elements;
  for (std::size_t i = 0; i < splice_end; ++i) {
    const Pattern& k = kids[i];
    if (k.kind() != Pattern::Kind::StarVariable) {
      elements.push_back(instantiate(ctx, k, s));
      continue;
    }
    if (const auto* l = s.list(k.name())) {
      elements.insert(elements.end(), l->begin(), l->end());
    } else if (const NodeRef* t = s.term(k.name())) {
      if (store_->op_of(*t) != op) {
        throw Error(ErrorCode::SortMismatch, "cannot splice " + store_->print_term(*t) + " into '" + info.name + "'");
      }
      auto ts = store_->children(*t);
      elements.insert(elements.end(), ts.begin(), ts.end());
    } else {
      throw Error(ErrorCode::UnboundVariable, "unbound variable '" + k.name() + "*'");
    }
  }
  return fold_in(ctx, op, elements, seed);
}

// ---------------------------------------------------------------------------

Runtime load_runtime(std::string_view text, std::span<const SignatureModule> available, FactoryConfig config) {
  SignatureModule parsed = parse_module(text);
  auto module = std::make_shared<const SignatureModule>(resolve_imports(parsed, available));
  const ValidationReport report = validate(*module);
  if (!report.accepted()) {
    throw Error(ErrorCode::InvalidModule, format_diagnostic(report.diagnostics.front()));
  }
  Runtime rt;
  rt.module = module;
  rt.store = std::make_unique<TermStore>(std::make_shared<const Signature>(*module));
  rt.factory = std::make_unique<Factory>(module, *rt.store, config);
  return rt;
}

}  // namespace gom
