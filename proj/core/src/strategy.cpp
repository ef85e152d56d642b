#include "gom/strategy.hpp"

#include <stdexcept>

namespace gom {

std::string to_string(const Position& pos) {
  if (pos.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(pos[i]);
  }
  return out;
}

bool ResultSink::add(NodeRef t) {
  if (!seen_.insert(t).second) return false;
  items_.push_back(t);
  return true;
}

NodeRef CollectHit::replace(NodeRef replacement) const {
  NodeRef cur = replacement;
  for (std::size_t i = position_.size(); i-- > 0;) {
    const NodeRef parent = spine_[i];
    auto kids = factory_.store().children(parent);
    std::vector<NodeRef> next(kids.begin(), kids.end());
    next[position_[i]] = cur;
    cur = factory_.rebuild(parent, next);
  }
  return cur;
}

// ---------------------------------------------------------------------------

struct Strategy::Node {
  Kind kind = Kind::Identity;
  std::vector<Strategy> children;
  OpId op{};
  std::optional<Pattern> lhs;
  std::optional<Pattern> rhs;
  GuardFn guard;
  CollectAction action;
};

namespace {

std::shared_ptr<Strategy::Node> make_node(Strategy::Kind kind, std::vector<Strategy> children = {}) {
  auto n = std::make_shared<Strategy::Node>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

}  // namespace

Strategy Strategy::identity() { return Strategy(make_node(Kind::Identity)); }
Strategy Strategy::fail() { return Strategy(make_node(Kind::Fail)); }

Strategy Strategy::sequence(Strategy first, Strategy second) {
  return Strategy(make_node(Kind::Sequence, {std::move(first), std::move(second)}));
}

Strategy Strategy::choice(Strategy first, Strategy second) {
  return Strategy(make_node(Kind::Choice, {std::move(first), std::move(second)}));
}

Strategy Strategy::all(Strategy s) { return Strategy(make_node(Kind::All, {std::move(s)})); }
Strategy Strategy::one(Strategy s) { return Strategy(make_node(Kind::One, {std::move(s)})); }

Strategy Strategy::congruence(OpId op, std::vector<Strategy> children) {
  auto n = make_node(Kind::Congruence, std::move(children));
  n->op = op;
  return Strategy(std::move(n));
}

Strategy Strategy::rule(Pattern lhs, Pattern rhs, GuardFn guard) {
  auto n = make_node(Kind::Rule);
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->guard = std::move(guard);
  return Strategy(std::move(n));
}

Strategy Strategy::collect(Pattern pattern, GuardFn guard, CollectAction action) {
  auto n = make_node(Kind::Collect);
  n->lhs = std::move(pattern);
  n->guard = std::move(guard);
  n->action = std::move(action);
  return Strategy(std::move(n));
}

Strategy Strategy::fix(const std::function<Strategy(const Strategy& self)>& body) {
  auto fix_node = make_node(Kind::Fix);
  Strategy self(make_node(Kind::Recurse));
  // Non-owning back edge; the fix node owns the body, which owns `self`.
  self.target_ = fix_node.get();
  fix_node->children.push_back(body(self));
  return Strategy(std::move(fix_node));
}

Strategy::Kind Strategy::kind() const { return node_->kind; }

Strategy try_(Strategy s) { return Strategy::choice(std::move(s), Strategy::identity()); }

Strategy top_down(Strategy s) {
  return Strategy::fix([&](const Strategy& self) { return Strategy::sequence(s, Strategy::all(self)); });
}

Strategy bottom_up(Strategy s) {
  return Strategy::fix([&](const Strategy& self) { return Strategy::sequence(Strategy::all(self), s); });
}

Strategy innermost(Strategy s) {
  return Strategy::fix([&](const Strategy& self) {
    return Strategy::sequence(Strategy::all(self), try_(Strategy::sequence(s, self)));
  });
}

// ---------------------------------------------------------------------------

class StrategyRunner {
 public:
  StrategyRunner(const Factory& factory, ApplyConfig config) : factory_(factory), config_(config) {}

  std::optional<NodeRef> run(const Strategy& s, NodeRef t) {
    const Strategy::Node* n = s.node_.get();
    if (n->kind == Strategy::Kind::Recurse) n = s.target_;
    return run_node(*n, t);
  }

 private:
  std::optional<NodeRef> run_node(const Strategy::Node& n, NodeRef t) {
    using K = Strategy::Kind;
    const TermStore& store = factory_.store();
    switch (n.kind) {
      case K::Identity:
      case K::Collect: return t;
      case K::Fail: return std::nullopt;
      case K::Fix: return run(n.children.front(), t);
      case K::Recurse: throw std::logic_error("unbound recursion variable");
      case K::Sequence: {
        auto mid = run(n.children[0], t);
        if (!mid) return std::nullopt;
        return run(n.children[1], *mid);
      }
      case K::Choice: {
        if (auto r = run(n.children[0], t)) return r;
        return run(n.children[1], t);
      }
      case K::All: {
        auto kids = store.children(t);
        std::vector<NodeRef> next(kids.begin(), kids.end());
        bool changed = false;
        for (auto& k : next) {
          auto r = run(n.children[0], k);
          if (!r) return std::nullopt;
          changed |= *r != k;
          k = *r;
        }
        return changed ? factory_.rebuild(t, next) : t;
      }
      case K::One: {
        auto kids = store.children(t);
        for (std::size_t i = 0; i < kids.size(); ++i) {
          if (auto r = run(n.children[0], kids[i])) {
            if (*r == kids[i]) return t;
            std::vector<NodeRef> next(kids.begin(), kids.end());
            next[i] = *r;
            return factory_.rebuild(t, next);
          }
        }
        return std::nullopt;
      }
      case K::Congruence: {
        auto kids = store.children(t);
        if (store.op_of(t) != n.op || kids.size() != n.children.size()) return std::nullopt;
        std::vector<NodeRef> next(kids.begin(), kids.end());
        bool changed = false;
        for (std::size_t i = 0; i < next.size(); ++i) {
          auto r = run(n.children[i], next[i]);
          if (!r) return std::nullopt;
          changed |= *r != next[i];
          next[i] = *r;
        }
        return changed ? factory_.rebuild(t, next) : t;
      }
      case K::Rule: {
        std::optional<NodeRef> out;
        for_each_match(store, *n.lhs, t, {}, [&](const Substitution& s) {
          if (n.guard && !n.guard(s)) return true;
          if (++steps_ > config_.step_budget) {
            throw Error(ErrorCode::StepBudgetExceeded,
                        "strategy exceeded " + std::to_string(config_.step_budget) + " rule applications");
          }
          out = apply_substitution(factory_, *n.rhs, s);
          return false;
        });
        return out;
      }
    }
    return std::nullopt;
  }

  const Factory& factory_;
  ApplyConfig config_;
  std::size_t steps_ = 0;
};

std::optional<NodeRef> apply(const Strategy& s, NodeRef t, const Factory& factory, ApplyConfig config) {
  StrategyRunner runner(factory, config);
  return runner.run(s, t);
}

// ---------------------------------------------------------------------------

namespace {

void walk(const TermStore& store, std::vector<NodeRef>& spine, Position& pos,
          const std::function<void(std::span<const NodeRef>, const Position&)>& visit) {
  visit(spine, pos);
  const auto kids = store.children(spine.back());
  for (std::uint32_t i = 0; i < kids.size(); ++i) {
    spine.push_back(kids[i]);
    pos.push_back(i);
    walk(store, spine, pos, visit);
    pos.pop_back();
    spine.pop_back();
  }
}

}  // namespace

ResultSink& collect_everywhere(const Strategy& c, NodeRef t, const Factory& factory, ResultSink& sink) {
  const Strategy::Node& n = *c.node_;
  if (n.kind != Strategy::Kind::Collect) throw std::invalid_argument("collect_everywhere needs a collect strategy");
  const TermStore& store = factory.store();
  std::vector<NodeRef> spine{t};
  Position pos;
  walk(store, spine, pos, [&](std::span<const NodeRef> sp, const Position& p) {
    for_each_match(store, *n.lhs, sp.back(), {}, [&](const Substitution& s) {
      if (n.guard && !n.guard(s)) return true;
      n.action(CollectHit(factory, sp, p, s), sink);
      return true;
    });
  });
  return sink;
}

void for_each_position(const TermStore& store, NodeRef t,
                       const std::function<void(const Position&, NodeRef)>& visit) {
  std::vector<NodeRef> spine{t};
  Position pos;
  walk(store, spine, pos, [&](std::span<const NodeRef> sp, const Position& p) { visit(p, sp.back()); });
}

NodeRef subterm_at(const TermStore& store, NodeRef t, const Position& pos) {
  for (std::uint32_t i : pos) {
    const auto kids = store.children(t);
    if (i >= kids.size()) throw std::out_of_range("no subterm at position " + to_string(pos));
    t = kids[i];
  }
  return t;
}

}  // namespace gom
