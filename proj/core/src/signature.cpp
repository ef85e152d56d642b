#include "gom/signature.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "gom/term_store.hpp"

namespace gom {

std::string_view to_string(HookKind kind) {
  switch (kind) {
    case HookKind::Make: return "make";
    case HookKind::MakeBefore: return "make_before";
    case HookKind::MakeAfter: return "make_after";
    case HookKind::MakeInsert: return "make_insert";
    case HookKind::MakeBeforeInsert: return "make_before_insert";
    case HookKind::MakeAfterInsert: return "make_after_insert";
  }
  return "?";
}

std::optional<HookKind> hook_kind_from_string(std::string_view text) {
  for (auto k : {HookKind::Make, HookKind::MakeBefore, HookKind::MakeAfter, HookKind::MakeInsert,
                 HookKind::MakeBeforeInsert, HookKind::MakeAfterInsert}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

bool is_insert_kind(HookKind kind) {
  return kind == HookKind::MakeInsert || kind == HookKind::MakeBeforeInsert ||
         kind == HookKind::MakeAfterInsert;
}

// ---------------------------------------------------------------------------
// BuiltinRegistry

namespace {

bool is_constant(const TermStore& store, NodeRef t) { return store.info(t).is_constant(); }

bool is_negation_of(const TermStore& store, NodeRef n, NodeRef x) {
  const auto& info = store.info(n);
  return info.name == "neg" && info.arity() == 1 && store.children(n)[0] == x;
}

// Literals of `t`: constants, and neg(constant) as a unit.
void collect_literals(const TermStore& store, NodeRef t, std::vector<NodeRef>& out) {
  const auto& info = store.info(t);
  if (info.is_constant()) {
    out.push_back(t);
    return;
  }
  if (info.name == "neg" && info.arity() == 1 && is_constant(store, store.children(t)[0])) {
    out.push_back(t);
    return;
  }
  for (NodeRef c : store.children(t)) collect_literals(store, c, out);
}

}  // namespace

bool is_dual(const TermStore& store, NodeRef x, NodeRef y) {
  return (is_constant(store, x) && is_negation_of(store, y, x)) ||
         (is_constant(store, y) && is_negation_of(store, x, y));
}

bool can_react_heuristic(const TermStore& store, std::span<const NodeRef> part, NodeRef u) {
  std::vector<NodeRef> mine, theirs;
  for (NodeRef p : part) collect_literals(store, p, mine);
  collect_literals(store, u, theirs);
  for (NodeRef m : mine) {
    for (NodeRef t : theirs) {
      if (is_dual(store, m, t)) return true;
    }
  }
  return false;
}

BuiltinRegistry BuiltinRegistry::standard() {
  BuiltinRegistry reg;
  reg.set_comparator("compare_printed", [](const TermStore& store, NodeRef a, NodeRef b) {
    return store.compare_terms(a, b);
  });
  reg.add_predicate("dual", 2, [](const TermStore& store, std::span<const PredicateArg> args) {
    if (args[0].is_list || args[1].is_list) return false;
    return is_dual(store, args[0].items[0], args[1].items[0]);
  });
  reg.add_predicate("can_react", 2, [](const TermStore& store, std::span<const PredicateArg> args) {
    if (args[1].is_list) return false;
    return can_react_heuristic(store, args[0].items, args[1].items[0]);
  });
  return reg;
}

void BuiltinRegistry::set_comparator(std::string name, Comparator cmp) {
  comparator_name_ = std::move(name);
  comparator_ = std::move(cmp);
}

void BuiltinRegistry::add_predicate(std::string name, std::size_t arity, Predicate pred) {
  predicates_[std::move(name)] = Entry{arity, std::move(pred)};
}

const Predicate* BuiltinRegistry::predicate(std::string_view name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second.fn;
}

std::optional<std::size_t> BuiltinRegistry::predicate_arity(std::string_view name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) return std::nullopt;
  return it->second.arity;
}

bool BuiltinRegistry::has(std::string_view name) const {
  return name == comparator_name_ || predicates_.contains(name);
}

bool operator==(const BuiltinRegistry& a, const BuiltinRegistry& b) {
  if (a.comparator_name_ != b.comparator_name_ || a.predicates_.size() != b.predicates_.size()) {
    return false;
  }
  return std::equal(a.predicates_.begin(), a.predicates_.end(), b.predicates_.begin(),
                    [](const auto& x, const auto& y) {
                      return x.first == y.first && x.second.arity == y.second.arity;
                    });
}

// ---------------------------------------------------------------------------
// SignatureModule

const OperatorDecl* SignatureModule::find_operator(std::string_view op) const {
  auto it = std::find_if(operators.begin(), operators.end(),
                         [&](const OperatorDecl& d) { return d.name == op; });
  return it == operators.end() ? nullptr : &*it;
}

const SortDecl* SignatureModule::find_sort(std::string_view sort) const {
  auto it = std::find_if(sorts.begin(), sorts.end(), [&](const SortDecl& d) { return d.name == sort; });
  return it == sorts.end() ? nullptr : &*it;
}

namespace {

class ImportResolver {
 public:
  ImportResolver(std::span<const SignatureModule> available, SignatureModule& out)
      : available_(available), out_(out) {}

  void visit_imports(const SignatureModule& m) {
    stack_.push_back(m.name);
    for (const auto& imp : m.imports) visit(imp);
    stack_.pop_back();
  }

  void merge(const SignatureModule& m) {
    for (const auto& s : m.sorts) {
      if (!out_.find_sort(s.name)) out_.sorts.push_back(s);
    }
    for (const auto& op : m.operators) {
      if (const auto* prev = out_.find_operator(op.name)) {
        throw Error(ErrorCode::NameClash, "operator '" + op.name + "' declared in modules '" +
                                              prev->origin + "' and '" + op.origin + "'");
      }
      out_.operators.push_back(op);
    }
    out_.hooks.insert(out_.hooks.end(), m.hooks.begin(), m.hooks.end());
    out_.factory.insert(out_.factory.end(), m.factory.begin(), m.factory.end());
  }

 private:
  void visit(const std::string& name) {
    if (auto it = std::find(stack_.begin(), stack_.end(), name); it != stack_.end()) {
      std::string path;
      for (auto p = it; p != stack_.end(); ++p) path += *p + " -> ";
      throw Error(ErrorCode::ImportCycle, "import cycle: " + path + name);
    }
    if (done_.contains(name)) return;
    auto found = std::find_if(available_.begin(), available_.end(),
                              [&](const SignatureModule& m) { return m.name == name; });
    if (found == available_.end()) {
      throw Error(ErrorCode::UnknownImport, "unknown module '" + name + "'");
    }
    visit_imports(*found);
    merge(*found);
    done_.insert(name);
  }

  std::span<const SignatureModule> available_;
  SignatureModule& out_;
  std::vector<std::string> stack_;
  std::set<std::string> done_;
};

}  // namespace

SignatureModule resolve_imports(const SignatureModule& module,
                                std::span<const SignatureModule> available) {
  SignatureModule out;
  out.name = module.name;
  out.imports = module.imports;
  out.builtins = module.builtins;
  out.pos = module.pos;
  ImportResolver resolver(available, out);
  resolver.visit_imports(module);
  resolver.merge(module);
  return out;
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [&](const Diagnostic& d) { return d.code == code; });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

constexpr std::string_view kComparisons[] = {"lt", "leq", "gt", "geq"};

class Validator {
 public:
  explicit Validator(const SignatureModule& m) : m_(m) {
    for (const auto& op : m.operators) ops_.emplace(op.name, &op);
  }

  ValidationReport run() {
    check_sorts();
    check_operators();
    check_factory();
    check_hooks();
    return std::move(report_);
  }

 private:
  void error(SourcePos pos, std::string code, std::string message) {
    report_.diagnostics.push_back({pos, std::move(code), std::move(message)});
  }

  void check_sorts() {
    std::unordered_set<std::string> seen;
    for (const auto& s : m_.sorts) {
      if (!seen.insert(s.name).second) error(s.pos, "DuplicateSort", "sort '" + s.name + "' declared twice");
    }
  }

  void check_sort_ref(const std::string& sort, SourcePos pos, const std::string& where) {
    if (!m_.find_sort(sort)) error(pos, "UnknownSort", "unknown sort '" + sort + "' in " + where);
  }

  void check_operators() {
    std::unordered_set<std::string> seen;
    for (const auto& op : m_.operators) {
      if (!seen.insert(op.name).second) {
        error(op.pos, "DuplicateOperator", "operator '" + op.name + "' declared twice");
      }
      check_sort_ref(op.result_sort, op.pos, "result of '" + op.name + "'");
      if (op.is_variadic()) {
        check_sort_ref(op.element_sort(), op.pos, "elements of '" + op.name + "'");
        continue;
      }
      std::unordered_set<std::string> slots;
      for (const auto& slot : op.slots()) {
        if (!slots.insert(slot.name).second) {
          error(op.pos, "DuplicateSlot", "slot '" + slot.name + "' repeated in '" + op.name + "'");
        }
        check_sort_ref(slot.sort, op.pos, "slot '" + slot.name + "' of '" + op.name + "'");
      }
    }
  }

  void check_factory() {
    for (const auto& use : m_.factory) {
      if (!m_.builtins.has(use.name)) error(use.pos, "UnknownBuiltin", "no builtin named '" + use.name + "'");
    }
  }

  void check_hooks() {
    std::set<std::pair<std::string, HookKind>> seen;
    for (const auto& hook : m_.hooks) {
      auto it = ops_.find(hook.op);
      if (it == ops_.end()) {
        error(hook.pos, "UnknownHookOperator", "hook on undeclared operator '" + hook.op + "'");
        continue;
      }
      const OperatorDecl& op = *it->second;
      if (!seen.emplace(hook.op, hook.kind).second) {
        error(hook.pos, "DuplicateHook",
              "second " + std::string(to_string(hook.kind)) + " hook on '" + hook.op + "'");
      }
      if (is_insert_kind(hook.kind) != op.is_variadic()) {
        error(hook.pos, "HookKindMismatch",
              std::string(to_string(hook.kind)) + " hook on " + (op.is_variadic() ? "variadic" : "fixed") +
                  " operator '" + op.name + "'");
        continue;
      }
      std::size_t expected = op.is_variadic() ? 2 : op.slots().size();
      if (hook.params.size() != expected) {
        error(hook.pos, "HookArity",
              "hook on '" + op.name + "' takes " + std::to_string(expected) + " parameters, got " +
                  std::to_string(hook.params.size()));
        continue;
      }
      std::unordered_set<std::string> params;
      for (const auto& p : hook.params) {
        if (!params.insert(p).second) error(hook.pos, "DuplicateParam", "parameter '" + p + "' repeated");
        if (ops_.contains(p)) error(hook.pos, "ParamShadowsOperator", "parameter '" + p + "' names an operator");
      }
      for (const auto& clause : hook.body) check_clause(hook, op, clause);
    }
  }

  struct Scope {
    std::unordered_set<std::string> terms;
    std::unordered_set<std::string> lists;
    bool bound(const std::string& n) const { return terms.contains(n) || lists.contains(n); }
  };

  // `in_variadic`: the expression is a direct argument of a variadic operator
  // (or of a guard predicate), where a star may appear.
  void check_expr(const PatternExpr& e, bool in_variadic, bool is_template, Scope& scope) {
    if (e.name == "_") {
      if (is_template) error(e.pos, "WildcardInTemplate", "'_' cannot be instantiated");
      return;
    }
    if (e.star) {
      if (!in_variadic) error(e.pos, "StarOutsideVariadic", "'" + e.name + "*' outside a variadic argument list");
      if (is_template) {
        if (!scope.bound(e.name)) error(e.pos, "UnboundVariable", "variable '" + e.name + "*' is not bound");
      } else {
        scope.lists.insert(e.name);
      }
      return;
    }
    auto it = ops_.find(e.name);
    if (it == ops_.end()) {
      if (e.call) {
        error(e.pos, "UnknownOperator", "unknown operator '" + e.name + "'");
        return;
      }
      if (is_template) {
        if (!scope.bound(e.name)) error(e.pos, "UnboundVariable", "variable '" + e.name + "' is not bound");
      } else {
        scope.terms.insert(e.name);
      }
      return;
    }
    const OperatorDecl& op = *it->second;
    if (!op.is_variadic() && e.args.size() != op.slots().size()) {
      error(e.pos, "ArityMismatch",
            "'" + op.name + "' takes " + std::to_string(op.slots().size()) + " arguments, got " +
                std::to_string(e.args.size()));
    }
    for (const auto& a : e.args) check_expr(a, op.is_variadic(), is_template, scope);
  }

  void check_guard(const GuardExpr& g, Scope& scope) {
    if (g.op != GuardOp::Predicate) {
      for (const auto& o : g.operands) check_guard(o, scope);
      return;
    }
    for (const auto& a : g.args) check_expr(a, true, true, scope);
    const bool comparison = std::find(std::begin(kComparisons), std::end(kComparisons), g.predicate) !=
                            std::end(kComparisons);
    if (comparison) {
      bool ok = g.args.size() == 2 && !g.args[0].star && !g.args[1].star;
      if (!ok) error(g.pos, "PredicateArity", "'" + g.predicate + "' compares two terms");
    } else if (g.predicate == "is_empty" || g.predicate == "non_empty") {
      if (g.args.size() != 1 || !g.args[0].star) {
        error(g.pos, "PredicateArity", "'" + g.predicate + "' takes one star variable");
      }
    } else if (auto arity = m_.builtins.predicate_arity(g.predicate)) {
      if (*arity != g.args.size()) {
        error(g.pos, "PredicateArity",
              "'" + g.predicate + "' takes " + std::to_string(*arity) + " arguments");
      }
    } else {
      error(g.pos, "UnknownPredicate", "unknown predicate '" + g.predicate + "'");
    }
  }

  void check_clause(const HookDecl& hook, const OperatorDecl& op, const RuleClause& clause) {
    if (clause.patterns.size() != hook.params.size()) {
      error(clause.pos, "PatternArity",
            "clause has " + std::to_string(clause.patterns.size()) + " patterns for " +
                std::to_string(hook.params.size()) + " parameters");
      return;
    }
    Scope scope;
    scope.terms.insert(hook.params.begin(), hook.params.end());
    for (const auto& p : clause.patterns) check_expr(p, false, false, scope);
    if (clause.guard) check_guard(*clause.guard, scope);

    const auto& action = clause.action;
    const bool before = hook.kind == HookKind::MakeBefore || hook.kind == HookKind::MakeBeforeInsert;
    const bool make = hook.kind == HookKind::Make || hook.kind == HookKind::MakeInsert;
    switch (action.kind) {
      case ActionKind::Build:
        if (before && hook.params.size() != 1) {
          error(action.pos, "ActionKindMismatch", "make_before hooks must produce an argument tuple");
        }
        break;
      case ActionKind::Raw: {
        if (!make) error(action.pos, "ActionKindMismatch", "raw(...) is only available in make hooks");
        std::size_t expected = op.is_variadic() ? 2 : op.slots().size();
        if (action.items.size() != expected) {
          error(action.pos, "RawArity", "raw(...) for '" + op.name + "' takes " + std::to_string(expected) +
                                            " arguments");
        }
        break;
      }
      case ActionKind::Tuple:
        if (!before) error(action.pos, "ActionKindMismatch", "tuples are only produced by make_before hooks");
        if (action.items.size() != hook.params.size()) {
          error(action.pos, "TupleArity", "tuple must have one entry per hook parameter");
        }
        break;
    }
    for (const auto& item : action.items) check_expr(item, false, true, scope);
  }

  const SignatureModule& m_;
  std::unordered_map<std::string, const OperatorDecl*> ops_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const SignatureModule& module) { return Validator(module).run(); }

// ---------------------------------------------------------------------------
// Pretty printing

namespace {

void print_expr(std::ostream& out, const PatternExpr& e) {
  out << e.name;
  if (e.star) out << '*';
  if (e.call) {
    out << '(';
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (i) out << ", ";
      print_expr(out, e.args[i]);
    }
    out << ')';
  }
}

void print_guard(std::ostream& out, const GuardExpr& g) {
  switch (g.op) {
    case GuardOp::Predicate:
      out << g.predicate << '(';
      for (std::size_t i = 0; i < g.args.size(); ++i) {
        if (i) out << ", ";
        print_expr(out, g.args[i]);
      }
      out << ')';
      break;
    case GuardOp::Not:
      out << '!';
      if (g.operands[0].op == GuardOp::And) out << '(';
      print_guard(out, g.operands[0]);
      if (g.operands[0].op == GuardOp::And) out << ')';
      break;
    case GuardOp::And:
      for (std::size_t i = 0; i < g.operands.size(); ++i) {
        if (i) out << " && ";
        bool nested = g.operands[i].op == GuardOp::And;
        if (nested) out << '(';
        print_guard(out, g.operands[i]);
        if (nested) out << ')';
      }
      break;
  }
}

void print_list(std::ostream& out, const std::vector<PatternExpr>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ", ";
    print_expr(out, items[i]);
  }
}

}  // namespace

std::string to_gom_text(const SignatureModule& m) {
  std::ostringstream out;
  out << "module " << m.name << '\n';
  if (!m.imports.empty()) {
    out << "  imports";
    for (const auto& i : m.imports) out << ' ' << i;
    out << '\n';
  }
  out << "  sorts";
  for (const auto& s : m.sorts) out << ' ' << s.name;
  out << "\n  abstract syntax\n";
  for (const auto& op : m.operators) {
    out << "    " << op.name;
    if (op.is_variadic()) {
      out << '(' << op.element_sort() << "*)";
    } else if (!op.slots().empty()) {
      out << '(';
      for (std::size_t i = 0; i < op.slots().size(); ++i) {
        if (i) out << ", ";
        out << op.slots()[i].name << ':' << op.slots()[i].sort;
      }
      out << ')';
    }
    out << " -> " << op.result_sort << '\n';
  }
  if (!m.factory.empty()) {
    out << "    factory {";
    for (const auto& use : m.factory) out << ' ' << use.name << ';';
    out << " }\n";
  }
  for (const auto& hook : m.hooks) {
    out << "    " << hook.op << ':' << to_string(hook.kind) << '(';
    for (std::size_t i = 0; i < hook.params.size(); ++i) {
      if (i) out << ", ";
      out << hook.params[i];
    }
    out << ") {\n";
    for (const auto& clause : hook.body) {
      out << "      ";
      print_list(out, clause.patterns);
      if (clause.guard) {
        out << " where ";
        print_guard(out, *clause.guard);
      }
      out << " -> ";
      switch (clause.action.kind) {
        case ActionKind::Build: print_list(out, clause.action.items); break;
        case ActionKind::Raw:
          out << "raw(";
          print_list(out, clause.action.items);
          out << ')';
          break;
        case ActionKind::Tuple:
          out << '(';
          print_list(out, clause.action.items);
          out << ')';
          break;
      }
      out << ";\n";
    }
    out << "    }\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Signature

Signature::Signature(const SignatureModule& module) {
  for (const auto& s : module.sorts) {
    sort_index_.emplace(s.name, SortId{static_cast<std::uint32_t>(sorts_.size())});
    sorts_.push_back(s.name);
  }
  auto sort = [&](const std::string& name) {
    auto it = sort_index_.find(name);
    if (it == sort_index_.end()) throw Error(ErrorCode::UnknownSort, "unknown sort '" + name + "'");
    return it->second;
  };
  for (const auto& op : module.operators) {
    OperatorInfo info;
    info.name = op.name;
    info.variadic = op.is_variadic();
    info.result_sort = sort(op.result_sort);
    if (info.variadic) {
      info.element_sort = sort(op.element_sort());
    } else {
      for (const auto& slot : op.slots()) {
        info.slot_names.push_back(slot.name);
        info.slot_sorts.push_back(sort(slot.sort));
      }
    }
    op_index_.emplace(op.name, OpId{static_cast<std::uint32_t>(ops_.size())});
    ops_.push_back(std::move(info));
  }
}

std::optional<OpId> Signature::find_operator(std::string_view name) const {
  auto it = op_index_.find(std::string(name));
  if (it == op_index_.end()) return std::nullopt;
  return it->second;
}

OpId Signature::operator_id(std::string_view name) const {
  if (auto id = find_operator(name)) return *id;
  throw Error(ErrorCode::UnknownOperator, "unknown operator '" + std::string(name) + "'");
}

std::optional<SortId> Signature::find_sort(std::string_view name) const {
  auto it = sort_index_.find(std::string(name));
  if (it == sort_index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace gom
