#include "gom/bv_prover.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "gom/parser.hpp"

namespace gom::bv {

namespace {

constexpr std::string_view kRuleNames[] = {"ai_down", "switch_left", "switch_right", "q_down"};

OpId require(const Factory& f, std::string_view name) {
  auto op = f.signature().find_operator(name);
  if (!op) throw Error(ErrorCode::InvalidModule, "prover needs operator '" + std::string(name) + "'");
  return *op;
}

SortId require_sort(const Factory& f, std::string_view name) {
  auto s = f.signature().find_sort(name);
  if (!s) throw Error(ErrorCode::InvalidModule, "prover needs sort '" + std::string(name) + "'");
  return *s;
}

}  // namespace

std::string_view to_string(Rule rule) { return kRuleNames[static_cast<std::size_t>(rule)]; }

std::optional<Rule> rule_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kRuleNames); ++i) {
    if (kRuleNames[i] == name) return static_cast<Rule>(i);
  }
  return std::nullopt;
}

Prover::Prover(const Factory& factory)
    : factory_(factory),
      store_(factory.store()),
      o_(require(factory, "o")),
      neg_(require(factory, "neg")),
      par_(require(factory, "par")),
      cop_(require(factory, "cop")),
      seq_(require(factory, "seq")),
      conc_par_(require(factory, "concPar")),
      conc_cop_(require(factory, "concCop")),
      conc_seq_(require(factory, "concSeq")),
      struc_(require_sort(factory, "Struc")),
      unit_(factory.build(o_, {})),
      pair_lhs_(parse_pattern("par(concPar(X1*,x,X2*,y,X3*))", factory.signature())),
      ai_rhs_(parse_pattern("par(concPar(X1*,X2*,X3*))", factory.signature())),
      switch_lhs_{parse_pattern("par(concPar(X1*,cop(concCop(R*,T*)),X2*,U,X3*))", factory.signature()),
                  parse_pattern("par(concPar(X1*,U,X2*,cop(concCop(R*,T*)),X3*))", factory.signature())},
      switch_rhs_{parse_pattern("par(concPar(cop(concCop(par(concPar(cop(concCop(R*)),U)),T*)),X1*,X2*,X3*))",
                                factory.signature()),
                  parse_pattern("par(concPar(cop(concCop(par(concPar(cop(concCop(T*)),U)),R*)),X1*,X2*,X3*))",
                                factory.signature())},
      q_rhs_(parse_pattern("par(concPar(seq(concSeq(par(concPar(R,U)),par(concPar(T,V)))),X1*,X2*,X3*))",
                           factory.signature())) {}

bool Prover::is_atom(NodeRef t) const {
  return store_.info(t).is_constant() && store_.sort_of(t) == struc_ && t != unit_;
}

bool Prover::can_react(std::span<const NodeRef> part, NodeRef u, bool pruning) const {
  return !pruning || can_react_heuristic(store_, part, u);
}

// (R, T) readings of `x` as a seq: every split point of a seq list, and
// (x, o), (o, x) for anything else.
std::vector<std::pair<NodeRef, NodeRef>> Prover::seq_splits(NodeRef x) const {
  if (store_.op_of(x) != seq_) return {{x, unit_}, {unit_, x}};
  const auto kids = store_.children(store_.children(x)[0]);
  std::vector<std::pair<NodeRef, NodeRef>> out;
  for (std::size_t k = 0; k <= kids.size(); ++k) {
    const NodeRef left = factory_.build(seq_, std::vector{factory_.build_variadic(conc_seq_, kids.first(k))});
    const NodeRef right = factory_.build(seq_, std::vector{factory_.build_variadic(conc_seq_, kids.subspan(k))});
    out.emplace_back(left, right);
  }
  return out;
}

std::vector<Successor> Prover::apply_rule(Rule rule, NodeRef t, bool pruning) const {
  std::vector<Successor> out;
  std::set<std::pair<Position, NodeRef>> seen;
  ResultSink sink;
  auto add = [&](Rule r, const CollectHit& hit, NodeRef replacement, ResultSink& c) {
    const NodeRef whole = hit.replace(replacement);
    if (seen.emplace(hit.position(), whole).second) out.push_back(Successor{r, hit.position(), whole});
    c.add(whole);
  };

  switch (rule) {
    case Rule::AiDown: {
      auto guard = [&](const Substitution& s) {
        const NodeRef x = *s.term("x");
        const NodeRef y = *s.term("y");
        return (is_atom(x) || is_atom(y)) && is_dual(store_, x, y);
      };
      auto action = [&](const CollectHit& hit, ResultSink& c) {
        add(Rule::AiDown, hit, apply_substitution(factory_, ai_rhs_, hit.substitution()), c);
      };
      collect_everywhere(Strategy::collect(pair_lhs_, guard, action), t, factory_, sink);
      break;
    }
    case Rule::SwitchLeft:
    case Rule::SwitchRight: {
      const bool left = rule == Rule::SwitchLeft;
      auto guard = [](const Substitution& s) { return !s.list("R")->empty() && !s.list("T")->empty(); };
      auto action = [&](const CollectHit& hit, ResultSink& c) {
        const Substitution& s = hit.substitution();
        const auto& moved = left ? *s.list("R") : *s.list("T");
        if (!can_react(moved, *s.term("U"), pruning)) return;
        add(rule, hit, apply_substitution(factory_, switch_rhs_[left ? 0 : 1], s), c);
      };
      for (const Pattern& lhs : switch_lhs_) {
        collect_everywhere(Strategy::collect(lhs, guard, action), t, factory_, sink);
      }
      break;
    }
    case Rule::QDown: {
      auto action = [&](const CollectHit& hit, ResultSink& c) {
        const Substitution& s = hit.substitution();
        const auto xs = seq_splits(*s.term("x"));
        const auto ys = seq_splits(*s.term("y"));
        for (const auto& [r, t1] : xs) {
          for (const auto& [u, v] : ys) {
            Substitution ext = s;
            ext.bind("R", r);
            ext.bind("T", t1);
            ext.bind("U", u);
            ext.bind("V", v);
            add(Rule::QDown, hit, apply_substitution(factory_, q_rhs_, ext), c);
          }
        }
      };
      collect_everywhere(Strategy::collect(pair_lhs_, {}, action), t, factory_, sink);
      break;
    }
  }
  return out;
}

std::vector<Successor> Prover::apply_ai_down(NodeRef t) const { return apply_rule(Rule::AiDown, t, false); }

std::vector<Successor> Prover::apply_switch(NodeRef t, bool pruning) const {
  auto out = apply_rule(Rule::SwitchLeft, t, pruning);
  auto right = apply_rule(Rule::SwitchRight, t, pruning);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

std::vector<Successor> Prover::apply_q_down(NodeRef t) const { return apply_rule(Rule::QDown, t, false); }

std::vector<Successor> Prover::successors(NodeRef t, bool pruning) const {
  auto out = apply_ai_down(t);
  auto sw = apply_switch(t, pruning);
  auto q = apply_q_down(t);
  out.insert(out.end(), sw.begin(), sw.end());
  out.insert(out.end(), q.begin(), q.end());
  return out;
}

// ---------------------------------------------------------------------------

ProofTrace Prover::prove(NodeRef goal, const SearchConfig& cfg) const {
  if (store_.sort_of(goal) != struc_) {
    throw Error(ErrorCode::InvalidGoalSort, "goal must have sort Struc, got " + store_.sort_name(goal));
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Entry {
    NodeRef state;
    std::size_t parent;
    Rule rule;
    Position position;
    std::size_t depth;
  };

  ProofTrace trace;
  trace.goal = goal;
  std::vector<Entry> entries{{goal, kNone, Rule::AiDown, {}, 0}};
  std::unordered_map<NodeRef, std::size_t> best{{goal, 0}};  // state -> smallest depth reached
  auto discovered = [&] { return cfg.deduplicate ? best.size() : entries.size(); };

  auto finish = [&](std::size_t idx) {
    for (std::size_t i = idx; entries[i].parent != kNone; i = entries[i].parent) {
      const Entry& e = entries[i];
      trace.steps.push_back(ProofStep{e.rule, e.position, entries[e.parent].state, e.state});
    }
    std::reverse(trace.steps.begin(), trace.steps.end());
    trace.status = ProofStatus::Proved;
    trace.states_discovered = discovered();
    return trace;
  };
  if (goal == unit_) return finish(0);

  // A successor is worth queueing unless already reached at no greater depth.
  auto is_new = [&](NodeRef r, std::size_t depth) {
    if (!cfg.deduplicate) return true;
    auto it = best.find(r);
    if (it == best.end()) return true;
    return cfg.order == SearchOrder::DepthFirst && depth < it->second;
  };

  std::deque<std::size_t> work{0};
  bool bounded = false;
  while (!work.empty()) {
    std::size_t idx;
    if (cfg.order == SearchOrder::BreadthFirst) {
      idx = work.front();
      work.pop_front();
    } else {
      idx = work.back();
      work.pop_back();
    }
    const NodeRef state = entries[idx].state;
    const std::size_t depth = entries[idx].depth;
    if (cfg.deduplicate && best[state] < depth) continue;  // superseded

    const auto succ = successors(state, cfg.can_react_pruning);
    if (depth >= cfg.max_depth) {
      if (std::any_of(succ.begin(), succ.end(), [&](const Successor& s) { return is_new(s.result, depth + 1); })) {
        bounded = true;
      }
      continue;
    }
    ++trace.states_expanded;

    std::vector<std::size_t> fresh;
    for (const Successor& s : succ) {
      if (!is_new(s.result, depth + 1)) continue;
      if ((!cfg.deduplicate || !best.contains(s.result)) && discovered() >= cfg.max_frontier) {
        bounded = true;
        work.clear();
        fresh.clear();
        break;
      }
      entries.push_back(Entry{s.result, idx, s.rule, s.position, depth + 1});
      if (cfg.deduplicate) best[s.result] = depth + 1;
      if (s.result == unit_) return finish(entries.size() - 1);
      fresh.push_back(entries.size() - 1);
    }
    if (cfg.order == SearchOrder::DepthFirst) std::reverse(fresh.begin(), fresh.end());
    work.insert(work.end(), fresh.begin(), fresh.end());
  }

  trace.status = bounded ? ProofStatus::NotProvedWithinBounds : ProofStatus::RefutedByExhaustion;
  trace.states_discovered = discovered();
  return trace;
}

bool Prover::check_step(const ProofStep& step) const {
  for (const Successor& s : apply_rule(step.rule, step.before, false)) {
    if (s.position == step.position && s.result == step.after) return true;
  }
  return false;
}

std::string Prover::format_trace(const ProofTrace& trace) const {
  std::string out;
  for (const ProofStep& s : trace.steps) {
    out += to_string(s.rule);
    out += " @ ";
    out += gom::to_string(s.position);
    out += " : ";
    out += store_.print_term(s.before);
    out += " ==> ";
    out += store_.print_term(s.after);
    out += '\n';
  }
  switch (trace.status) {
    case ProofStatus::Proved: out += "PROVED in " + std::to_string(trace.steps.size()) + " steps\n"; break;
    case ProofStatus::NotProvedWithinBounds: out += "NOT PROVED (bound)\n"; break;
    case ProofStatus::RefutedByExhaustion:
      out += "REFUTED (exhausted " + std::to_string(trace.states_discovered) + " states)\n";
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::string> struct_canonical_violation(const Factory& factory, NodeRef t) {
  const TermStore& store = factory.store();
  const Signature& sig = factory.signature();
  const OpId o = sig.operator_id("o");
  const std::pair<OpId, OpId> wrappers[] = {{sig.operator_id("par"), sig.operator_id("concPar")},
                                            {sig.operator_id("cop"), sig.operator_id("concCop")},
                                            {sig.operator_id("seq"), sig.operator_id("concSeq")}};
  const OpId conc_seq = sig.operator_id("concSeq");
  const auto& cmp = factory.module().builtins.comparator();

  std::optional<std::string> found;
  for_each_position(store, t, [&](const Position& pos, NodeRef n) {
    if (found) return;
    const OpId op = store.op_of(n);
    const auto kids = store.children(n);
    auto fail = [&](const std::string& what) { found = what + " at " + gom::to_string(pos); };
    for (const auto& [wrap, list] : wrappers) {
      if (op == wrap && store.children(kids[0]).size() < 2) return fail("empty or singleton " + sig.info(wrap).name);
      if (op != list) continue;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (kids[i] == factory.build(o, {})) return fail("unit inside " + sig.info(list).name);
        if (store.op_of(kids[i]) == wrap) return fail("unflattened " + sig.info(wrap).name);
        if (op != conc_seq && i > 0 && cmp(store, kids[i - 1], kids[i]) > 0) {
          return fail("unsorted " + sig.info(list).name);
        }
      }
    }
  });
  return found;
}

}  // namespace gom::bv
