#include "gom/matcher.hpp"

#include <algorithm>

#include "gom/term_store.hpp"

namespace gom {

Pattern compile_pattern(const PatternExpr& e, const Signature& sig, bool star_allowed) {
  if (e.name == "_") return Pattern::wildcard();
  if (e.star) {
    if (!star_allowed) {
      throw Error(ErrorCode::StarOutsideVariadic,
                  "'" + e.name + "*' is only allowed as an argument of a variadic operator");
    }
    return Pattern::star(e.name);
  }
  auto op = sig.find_operator(e.name);
  if (!op) {
    if (e.call) throw Error(ErrorCode::UnknownOperator, "unknown operator '" + e.name + "'");
    return Pattern::variable(e.name);
  }
  const OperatorInfo& info = sig.info(*op);
  if (!info.variadic && e.args.size() != info.arity()) {
    throw Error(ErrorCode::ArityMismatch, "'" + info.name + "' takes " + std::to_string(info.arity()) +
                                              " arguments, got " + std::to_string(e.args.size()));
  }
  std::vector<Pattern> children;
  children.reserve(e.args.size());
  for (const auto& a : e.args) children.push_back(compile_pattern(a, sig, info.variadic));
  return Pattern::apply(*op, std::move(children));
}

std::string to_string(const Pattern& p, const Signature& sig) {
  switch (p.kind()) {
    case Pattern::Kind::Wildcard: return "_";
    case Pattern::Kind::Variable: return p.name();
    case Pattern::Kind::StarVariable: return p.name() + "*";
    case Pattern::Kind::Operator: break;
  }
  const OperatorInfo& info = sig.info(p.op());
  std::string out = info.name;
  if (info.is_constant()) return out;
  out += '(';
  for (std::size_t i = 0; i < p.children().size(); ++i) {
    if (i) out += ',';
    out += to_string(p.children()[i], sig);
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

const Substitution::Entry* Substitution::find(std::string_view name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

const NodeRef* Substitution::term(std::string_view name) const {
  const Entry* e = find(name);
  return e && !e->is_list ? &e->term : nullptr;
}

const std::vector<NodeRef>* Substitution::list(std::string_view name) const {
  const Entry* e = find(name);
  return e && e->is_list ? &e->list : nullptr;
}

void Substitution::bind(std::string name, NodeRef value) {
  entries_.push_back(Entry{std::move(name), false, value, {}, {}});
}

void Substitution::bind_list(std::string name, std::vector<NodeRef> values, NodeRef suffix_of) {
  entries_.push_back(Entry{std::move(name), true, NodeRef{}, std::move(values), suffix_of});
}

std::vector<Substitution::Entry> Substitution::sorted() const {
  auto out = entries_;
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  return out;
}

std::string Substitution::to_string(const TermStore& store) const {
  if (entries_.empty()) return "{}";
  std::string out;
  for (const auto& e : sorted()) {
    if (!out.empty()) out += ' ';
    out += e.name;
    if (e.is_list) {
      out += "*=[";
      for (std::size_t i = 0; i < e.list.size(); ++i) {
        if (i) out += ',';
        out += store.print_term(e.list[i]);
      }
      out += ']';
    } else {
      out += '=';
      out += store.print_term(e.term);
    }
  }
  return out;
}

bool operator==(const Substitution& a, const Substitution& b) {
  return a.entries_.size() == b.entries_.size() && a.sorted() == b.sorted();
}

// ---------------------------------------------------------------------------
// Matching

namespace {

using Continuation = std::function<bool()>;

// Every function returns false iff the enumeration was stopped.
class Matcher {
 public:
  Matcher(const TermStore& store, Substitution s) : store_(store), s_(std::move(s)) {}

  const Substitution& substitution() const { return s_; }

  bool match(const Pattern& p, NodeRef t, const Continuation& k) {
    switch (p.kind()) {
      case Pattern::Kind::Wildcard: return k();
      case Pattern::Kind::StarVariable: return true;
      case Pattern::Kind::Variable: {
        if (const auto* e = s_.find(p.name())) {
          if (e->is_list || e->term != t) return true;
          return k();
        }
        const std::size_t mark = s_.size();
        s_.bind(p.name(), t);
        const bool go_on = k();
        s_.truncate(mark);
        return go_on;
      }
      case Pattern::Kind::Operator: break;
    }
    if (store_.op_of(t) != p.op()) return true;
    return match_seq(p.children(), 0, store_.children(t), 0, k, store_.info(t).variadic ? t : NodeRef{});
  }

  // `list` is the variadic node whose children are `ts`, if any.
  bool match_seq(std::span<const Pattern> ps, std::size_t i, std::span<const NodeRef> ts, std::size_t j,
                 const Continuation& k, NodeRef list = {}) {
    if (i == ps.size()) return j == ts.size() ? k() : true;
    const Pattern& p = ps[i];
    if (p.kind() != Pattern::Kind::StarVariable) {
      if (j == ts.size()) return true;
      return match(p, ts[j], [&] { return match_seq(ps, i + 1, ts, j + 1, k, list); });
    }

    if (const auto* e = s_.find(p.name())) {
      if (!e->is_list || e->list.size() > ts.size() - j) return true;
      if (!std::equal(e->list.begin(), e->list.end(), ts.begin() + static_cast<std::ptrdiff_t>(j))) return true;
      return match_seq(ps, i + 1, ts, j + e->list.size(), k, list);
    }

    std::size_t needed = 0;
    for (std::size_t q = i + 1; q < ps.size(); ++q) {
      if (ps[q].kind() != Pattern::Kind::StarVariable) ++needed;
    }
    if (ts.size() - j < needed) return true;
    const std::size_t max_len = ts.size() - j - needed;
    const std::size_t mark = s_.size();
    for (std::size_t len = 0; len <= max_len; ++len) {
      auto first = ts.begin() + static_cast<std::ptrdiff_t>(j);
      const bool suffix = list.valid() && j + len == ts.size();
      s_.bind_list(p.name(), std::vector<NodeRef>(first, first + static_cast<std::ptrdiff_t>(len)),
                   suffix ? list : NodeRef{});
      const bool go_on = match_seq(ps, i + 1, ts, j + len, k, list);
      s_.truncate(mark);
      if (!go_on) return false;
    }
    return true;
  }

 private:
  const TermStore& store_;
  Substitution s_;
};

}  // namespace

bool for_each_match(const TermStore& store, const Pattern& p, NodeRef subject, const Substitution& initial,
                    const MatchVisitor& visit) {
  Matcher m(store, initial);
  return m.match(p, subject, [&] { return visit(m.substitution()); });
}

bool for_each_match(const TermStore& store, std::span<const Pattern> patterns, std::span<const NodeRef> subjects,
                    const Substitution& initial, const MatchVisitor& visit) {
  Matcher m(store, initial);
  return m.match_seq(patterns, 0, subjects, 0, [&] { return visit(m.substitution()); });
}

std::optional<Substitution> match_one(const TermStore& store, const Pattern& p, NodeRef subject) {
  std::optional<Substitution> out;
  for_each_match(store, p, subject, {}, [&](const Substitution& s) {
    out = s;
    return false;
  });
  return out;
}

std::vector<Substitution> match_all(const TermStore& store, const Pattern& p, NodeRef subject) {
  std::vector<Substitution> out;
  for_each_match(store, p, subject, {}, [&](const Substitution& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

}  // namespace gom
