#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "gom/corpus.hpp"

namespace gom::test {

Runtime load_builtin(std::string_view name, FactoryConfig config) {
  auto text = corpus::builtin_module(name);
  if (!text) throw std::invalid_argument("no builtin module " + std::string(name));
  return load_runtime(*text, {}, config);
}

std::unique_ptr<Factory> hook_free_boolean(const Runtime& hooked) {
  auto copy = std::make_shared<SignatureModule>(*hooked.module);
  copy->hooks.clear();
  return std::make_unique<Factory>(copy, *hooked.store);
}

// ---------------------------------------------------------------------------

namespace {

SurfaceTerm leaf(std::string head) { return SurfaceTerm{std::move(head), {}, {}}; }

SurfaceTerm node(std::string head, std::vector<SurfaceTerm> kids) {
  return SurfaceTerm{std::move(head), std::move(kids), {}};
}

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

SurfaceTerm random_bool(Rng& rng, int depth) {
  if (depth <= 0 || uniform(rng, 0, 3) == 0) return leaf(uniform(rng, 0, 1) ? "True" : "False");
  switch (uniform(rng, 0, 2)) {
    case 0: return node("not", {random_bool(rng, depth - 1)});
    case 1: return node("and", {random_bool(rng, depth - 1), random_bool(rng, depth - 1)});
    default: return node("or", {random_bool(rng, depth - 1), random_bool(rng, depth - 1)});
  }
}

bool eval_bool(const SurfaceTerm& t) {
  if (t.head == "True") return true;
  if (t.head == "False") return false;
  if (t.head == "not") return !eval_bool(t.children.at(0));
  if (t.head == "and") return eval_bool(t.children.at(0)) && eval_bool(t.children.at(1));
  if (t.head == "or") return eval_bool(t.children.at(0)) || eval_bool(t.children.at(1));
  throw std::invalid_argument("not a boolean term: " + t.head);
}

std::optional<std::string> de_morgan_violation(const TermStore& store, NodeRef t) {
  const auto& info = store.info(t);
  if (info.name == "not") {
    const NodeRef c = store.children(t)[0];
    if (!store.info(c).is_constant()) return "negated non-constant in " + store.print_term(t);
  }
  for (NodeRef c : store.children(t)) {
    if (auto v = de_morgan_violation(store, c)) return v;
  }
  return std::nullopt;
}

Strategy de_morgan_rules(const Factory& factory) {
  const auto& sig = factory.signature();
  auto rule = [&](std::string_view lhs, std::string_view rhs) {
    return Strategy::rule(parse_pattern(lhs, sig), parse_pattern(rhs, sig));
  };
  return Strategy::choice(rule("not(not(x))", "x"),
                          Strategy::choice(rule("not(and(l,r))", "or(not(l),not(r))"),
                                           rule("not(or(l,r))", "and(not(l),not(r))")));
}

// ---------------------------------------------------------------------------
// Struct reference normalizer

namespace {

const char* const kAtoms[] = {"a", "b", "c", "d"};

// Normalized structure. Literals (atoms and negated atoms) keep their printed
// form in `text`.
struct St {
  char kind;  // 'o' unit, 'l' literal, 'P' par, 'C' copar, 'S' seq
  std::string text;
  std::vector<St> elems;
};

std::string list_name(char kind) { return kind == 'P' ? "par" : kind == 'C' ? "cop" : "seq"; }

St make(char kind, std::vector<St> in) {
  std::vector<St> flat;
  for (auto& e : in) {
    if (e.kind == 'o') continue;
    if (e.kind == kind) {
      for (auto& x : e.elems) flat.push_back(std::move(x));
    } else {
      flat.push_back(std::move(e));
    }
  }
  if (kind != 'S') {
    std::stable_sort(flat.begin(), flat.end(), [](const St& a, const St& b) { return a.text < b.text; });
  }
  if (flat.empty()) return St{'o', "o", {}};
  if (flat.size() == 1) return std::move(flat.front());
  const std::string name = list_name(kind);
  std::string conc = name == "par" ? "concPar" : name == "cop" ? "concCop" : "concSeq";
  std::string text = name + "(" + conc + "(";
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (i) text += ',';
    text += flat[i].text;
  }
  text += "))";
  return St{kind, std::move(text), std::move(flat)};
}

St normalize(const SurfaceTerm& t) {
  if (t.head == "o") return St{'o', "o", {}};
  if (t.children.empty()) return St{'l', t.head, {}};
  if (t.head == "neg") {
    const St inner = normalize(t.children.at(0));
    return St{'l', "neg(" + inner.text + ")", {}};
  }
  const char kind = t.head == "par" ? 'P' : t.head == "cop" ? 'C' : t.head == "seq" ? 'S' : '?';
  if (kind == '?') throw std::invalid_argument("not a structure: " + t.head);
  std::vector<St> elems;
  for (const auto& c : t.children.at(0).children) elems.push_back(normalize(c));
  return make(kind, std::move(elems));
}

}  // namespace

SurfaceTerm random_struct(Rng& rng, int depth) {
  const int roll = uniform(rng, 0, 9);
  if (depth <= 0 || roll < 4) {
    if (roll == 0) return leaf("o");
    SurfaceTerm atom = leaf(kAtoms[uniform(rng, 0, 3)]);
    return uniform(rng, 0, 2) == 0 ? node("neg", {atom}) : atom;
  }
  static const char* const kWrap[][2] = {{"par", "concPar"}, {"cop", "concCop"}, {"seq", "concSeq"}};
  const auto& w = kWrap[uniform(rng, 0, 2)];
  std::vector<SurfaceTerm> elems;
  const int n = uniform(rng, 0, 3);
  for (int i = 0; i < n; ++i) elems.push_back(random_struct(rng, depth - 1));
  return node(w[0], {node(w[1], std::move(elems))});
}

std::string reference_canonical(const SurfaceTerm& t) { return normalize(t).text; }

// ---------------------------------------------------------------------------
// Segment-enumeration oracle

std::vector<ListPattern> all_list_patterns(std::size_t max_len) {
  std::vector<ListPattern> out;
  ListPattern cur;
  const char* const terms[] = {"x", "y"};
  const char* const stars[] = {"X*", "Y*", "Z*"};
  std::function<void(int, int)> rec = [&](int nterms, int nstars) {
    out.push_back(cur);
    if (cur.size() == max_len) return;
    std::vector<std::string> choices{"a", "b", "c", "_"};
    for (int i = 0; i < nterms; ++i) choices.push_back(terms[i]);
    for (int i = 0; i < nstars; ++i) choices.push_back(stars[i]);
    for (const auto& c : choices) {
      cur.push_back(c);
      rec(nterms, nstars);
      cur.pop_back();
    }
    if (nterms < 2) {
      cur.push_back(terms[nterms]);
      rec(nterms + 1, nstars);
      cur.pop_back();
    }
    if (nstars < 3) {
      cur.push_back(stars[nstars]);
      rec(nterms, nstars + 1);
      cur.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

std::vector<std::string> segment_oracle(const ListPattern& p, const std::vector<std::string>& subject) {
  const std::size_t n = subject.size();
  std::size_t fixed = 0;
  std::vector<std::size_t> star_items;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].back() == '*') {
      star_items.push_back(i);
    } else {
      ++fixed;
    }
  }
  std::vector<std::string> out;
  if (fixed > n) return out;

  auto check = [&](const std::vector<std::size_t>& lens) {
    std::map<std::string, std::string> bound;  // bare name -> rendered value
    std::size_t pos = 0, k = 0;
    for (const auto& item : p) {
      if (item.back() == '*') {
        std::string seg = "[";
        for (std::size_t i = 0; i < lens[k]; ++i) {
          if (i) seg += ',';
          seg += subject[pos + i];
        }
        seg += ']';
        pos += lens[k++];
        const std::string name = item.substr(0, item.size() - 1);
        auto [it, fresh] = bound.emplace(name, seg);
        if (!fresh && it->second != seg) return;
        continue;
      }
      const std::string& v = subject[pos++];
      if (item == "_") continue;
      if (item == "a" || item == "b" || item == "c") {
        if (v != item) return;
        continue;
      }
      auto [it, fresh] = bound.emplace(item, v);
      if (!fresh && it->second != v) return;
    }
    if (bound.empty()) {
      out.push_back("{}");
      return;
    }
    std::string s;
    for (const auto& [name, value] : bound) {
      if (!s.empty()) s += ' ';
      const bool star = value.front() == '[';
      s += name + (star ? "*=" : "=") + value;
    }
    out.push_back(s);
  };

  // Star lengths in lexicographic order, summing to n - fixed.
  std::vector<std::size_t> lens(star_items.size());
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t left) {
    if (k == lens.size()) {
      if (left == 0) check(lens);
      return;
    }
    for (std::size_t l = 0; l <= left; ++l) {
      lens[k] = l;
      rec(k + 1, left - l);
    }
  };
  rec(0, n - fixed);
  return out;
}

// ---------------------------------------------------------------------------
// Reference BV search

namespace {

bool dual_literals(const St& x, const St& y) {
  return x.kind == 'l' && y.kind == 'l' && (y.text == "neg(" + x.text + ")" || x.text == "neg(" + y.text + ")");
}

void literals(const St& s, std::vector<const St*>& out) {
  if (s.kind == 'l' || s.kind == 'o') {
    out.push_back(&s);
    return;
  }
  for (const auto& e : s.elems) literals(e, out);
}

bool reacts(const std::vector<St>& part, const St& u) {
  std::vector<const St*> mine, theirs;
  for (const auto& p : part) literals(p, mine);
  literals(u, theirs);
  for (const St* m : mine) {
    for (const St* t : theirs) {
      if (dual_literals(*m, *t)) return true;
    }
  }
  return false;
}

std::vector<St> without(const std::vector<St>& xs, std::size_t i, std::size_t j) {
  std::vector<St> out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k != i && k != j) out.push_back(xs[k]);
  }
  return out;
}

std::vector<std::pair<St, St>> splits(const St& x) {
  const St unit{'o', "o", {}};
  if (x.kind != 'S') return {{x, unit}, {unit, x}};
  std::vector<std::pair<St, St>> out;
  for (std::size_t k = 0; k <= x.elems.size(); ++k) {
    std::vector<St> l(x.elems.begin(), x.elems.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<St> r(x.elems.begin() + static_cast<std::ptrdiff_t>(k), x.elems.end());
    out.emplace_back(make('S', std::move(l)), make('S', std::move(r)));
  }
  return out;
}

void root_steps(const St& s, bool pruning, std::vector<St>& out) {
  if (s.kind != 'P') return;
  const auto& e = s.elems;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (i == j) continue;
      // ai
      if (i < j && dual_literals(e[i], e[j])) out.push_back(make('P', without(e, i, j)));
      // switch: copar e[i] split into moved part R and rest T, U = e[j]
      if (e[i].kind == 'C') {
        const auto& cs = e[i].elems;
        const std::size_t full = (std::size_t{1} << cs.size()) - 1;
        for (std::size_t mask = 1; mask < full; ++mask) {
          std::vector<St> r, t;
          for (std::size_t k = 0; k < cs.size(); ++k) ((mask >> k) & 1 ? r : t).push_back(cs[k]);
          if (pruning && !reacts(r, e[j])) continue;
          St inner = make('P', {make('C', std::move(r)), e[j]});
          t.insert(t.begin(), std::move(inner));
          auto rest = without(e, i, j);
          rest.push_back(make('C', std::move(t)));
          out.push_back(make('P', std::move(rest)));
        }
      }
      // q
      if (i < j) {
        for (const auto& [r, t] : splits(e[i])) {
          for (const auto& [u, v] : splits(e[j])) {
            St q = make('S', {make('P', {r, u}), make('P', {t, v})});
            auto rest = without(e, i, j);
            rest.push_back(std::move(q));
            out.push_back(make('P', std::move(rest)));
          }
        }
      }
    }
  }
}

std::vector<St> all_steps(const St& s, bool pruning) {
  std::vector<St> out;
  root_steps(s, pruning, out);
  if (s.kind == 'P' || s.kind == 'C' || s.kind == 'S') {
    for (std::size_t i = 0; i < s.elems.size(); ++i) {
      for (auto& sub : all_steps(s.elems[i], pruning)) {
        std::vector<St> elems = s.elems;
        elems[i] = std::move(sub);
        out.push_back(make(s.kind, std::move(elems)));
      }
    }
  }
  return out;
}

}  // namespace

RefSearchResult reference_prove(const SurfaceTerm& goal, std::size_t max_depth, bool pruning,
                                std::size_t max_states) {
  const St start = normalize(goal);
  if (start.kind == 'o') return {RefVerdict::Proved, 1};
  std::unordered_set<std::string> seen{start.text};
  std::deque<std::pair<St, std::size_t>> queue{{start, 0}};
  bool bounded = false;
  while (!queue.empty()) {
    auto [s, depth] = std::move(queue.front());
    queue.pop_front();
    for (auto& next : all_steps(s, pruning)) {
      if (seen.contains(next.text)) continue;
      if (depth >= max_depth || seen.size() >= max_states) {
        bounded = true;
        continue;
      }
      if (next.kind == 'o') return {RefVerdict::Proved, seen.size() + 1};
      seen.insert(next.text);
      queue.emplace_back(std::move(next), depth + 1);
    }
  }
  return {bounded ? RefVerdict::Bound : RefVerdict::Refuted, seen.size()};
}

}  // namespace gom::test
