#include <gtest/gtest.h>

#include <algorithm>
#include <thread>

#include "gom/bv_prover.hpp"
#include "support.hpp"

namespace gom {
namespace {

using test::Rng;

class BooleanHooks : public ::testing::Test {
 protected:
  Runtime rt = test::load_builtin("boolean");
  const Factory& f = *rt.factory;
  const TermStore& store = *rt.store;
  std::string show(NodeRef t) const { return store.print_term(t); }
};

TEST_F(BooleanHooks, DoubleNegationVanishes) {
  const NodeRef t = f.parse("True");
  EXPECT_EQ(f.build("not", {f.build("not", {t})}), t);
}

TEST_F(BooleanHooks, NegationIsPushedInward) {
  const NodeRef conj = f.build("and", {f.parse("True"), f.parse("False")});
  EXPECT_EQ(show(f.build("not", {conj})), "or(not(True),not(False))");
  EXPECT_EQ(show(f.parse("not(or(True,not(False)))")), "and(not(True),False)");
}

TEST_F(BooleanHooks, ConstantsFallThroughToRaw) {
  EXPECT_EQ(show(f.build("not", {f.parse("True")})), "not(True)");
  EXPECT_EQ(show(f.parse("and(True,False)")), "and(True,False)");
}

TEST_F(BooleanHooks, SurfaceErrors) {
  auto code_of = [&](std::string_view text) {
    try {
      f.parse(text);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << text << " was accepted";
    return ErrorCode::SyntaxError;
  };
  EXPECT_EQ(code_of("and(True)"), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of("xor(True,False)"), ErrorCode::UnknownOperator);
  EXPECT_EQ(code_of("and(True,"), ErrorCode::SyntaxError);
}

TEST_F(BooleanHooks, DeMorganProperties) {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const SurfaceTerm s = test::random_bool(rng, 8);
    const NodeRef t = f.build_surface(s);
    EXPECT_EQ(test::de_morgan_violation(store, t), std::nullopt) << to_string(s);
    EXPECT_TRUE(f.is_fixpoint(t)) << show(t);
    EXPECT_EQ(test::eval_bool(parse_term(show(t))), test::eval_bool(s)) << to_string(s);
  }
}

TEST_F(BooleanHooks, SharedFactoryAcrossThreads) {
  std::vector<SurfaceTerm> terms;
  Rng rng(32);
  for (int i = 0; i < 200; ++i) terms.push_back(test::random_bool(rng, 6));
  std::vector<std::vector<NodeRef>> results(4);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < results.size(); ++k) {
    threads.emplace_back([&, k] {
      for (const auto& t : terms) results[k].push_back(f.build_surface(t));
    });
  }
  for (auto& th : threads) th.join();
  for (std::size_t k = 1; k < results.size(); ++k) EXPECT_EQ(results[k], results[0]);
}

class StructHooks : public ::testing::Test {
 protected:
  Runtime rt = test::load_builtin("struct");
  const Factory& f = *rt.factory;
  const TermStore& store = *rt.store;
  NodeRef p(std::string_view s) const { return f.parse(s); }
  NodeRef list(std::string_view op, std::initializer_list<std::string_view> items) const {
    std::vector<NodeRef> xs;
    for (auto i : items) xs.push_back(p(i));
    return f.build_variadic(f.op(op), xs);
  }
  std::string show(NodeRef t) const { return store.print_term(t); }
};

TEST_F(StructHooks, InsertExamples) {
  EXPECT_EQ(show(f.insert(f.op("concSeq"), p("o"), list("concSeq", {"a"}))), "concSeq(a)");
  EXPECT_EQ(show(f.insert(f.op("concSeq"), p("seq(concSeq(a,b))"), list("concSeq", {"c"}))), "concSeq(a,b,c)");
  EXPECT_EQ(show(f.insert(f.op("concPar"), p("b"), list("concPar", {"a", "c"}))), "concPar(a,b,c)");
}

TEST_F(StructHooks, BuildVariadicExamples) {
  const NodeRef empty = f.build_variadic(f.op("concPar"), {});
  EXPECT_EQ(empty, f.empty_list(f.op("concPar")));
  EXPECT_EQ(show(empty), "concPar()");
  EXPECT_EQ(f.build("par", {empty}), p("o"));
  EXPECT_EQ(show(list("concPar", {"b", "a"})), "concPar(a,b)");
  EXPECT_EQ(show(list("concSeq", {"a", "o", "b"})), "concSeq(a,b)");
  EXPECT_EQ(show(list("concSeq", {"b", "a"})), "concSeq(b,a)");
}

TEST_F(StructHooks, SurfaceExamples) {
  EXPECT_EQ(p("par(concPar(a))"), p("a"));
  EXPECT_EQ(show(p("par(concPar(a,par(concPar(b,c))))")), "par(concPar(a,b,c))");
  EXPECT_EQ(show(p("cop(concCop(o,o))")), "o");
  EXPECT_EQ(show(p("seq(concSeq(seq(concSeq(a,b)),seq(concSeq(c,d))))")), "seq(concSeq(a,b,c,d))");
  EXPECT_EQ(show(p("par(concPar(d,c,cop(concCop(b,a))))")), "par(concPar(c,cop(concCop(a,b)),d))");
  EXPECT_EQ(show(p("par(concPar(cop(concCop(a)),o,seq(concSeq(b))))")), "par(concPar(a,b))");
}

TEST_F(StructHooks, SortIsChecked) {
  try {
    p("neg(concPar())");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SortMismatch);
  }
  EXPECT_THROW(f.insert(f.op("concPar"), p("a"), list("concSeq", {"b"})), Error);
}

TEST_F(StructHooks, CanonicalFormProperty) {
  Rng rng(41);
  for (int i = 0; i < 400; ++i) {
    const SurfaceTerm s = test::random_struct(rng, 6);
    const NodeRef t = f.build_surface(s);
    EXPECT_EQ(bv::struct_canonical_violation(f, t), std::nullopt) << to_string(s);
    EXPECT_EQ(show(t), test::reference_canonical(s)) << to_string(s);
    EXPECT_TRUE(f.is_fixpoint(t));
    for_each_position(store, t, [&](const Position& pos, NodeRef n) {
      EXPECT_TRUE(f.is_fixpoint(n)) << show(t) << " at " << to_string(pos);
    });
  }
}

TEST_F(StructHooks, PermutationsCollapse) {
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    std::vector<NodeRef> elems;
    const int n = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int k = 0; k < n; ++k) elems.push_back(f.build_surface(test::random_struct(rng, 3)));
    const NodeRef base = f.build_variadic(f.op("concPar"), elems);
    EXPECT_EQ(bv::struct_canonical_violation(f, f.build("par", {base})), std::nullopt);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(elems.begin(), elems.end(), rng);
      EXPECT_EQ(f.build_variadic(f.op("concPar"), elems), base);
    }
  }
}

TEST(HookBudget, DivergentHookIsReported) {
  Runtime rt = load_runtime(R"(module Loop
    sorts S
    abstract syntax
      z -> S
      f(x:S) -> S
      f:make(x) { y -> f(y); }
  )");
  try {
    rt.factory->parse("f(z)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecursionBudgetExceeded);
  }
  // The factory stays usable after a divergent call.
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("z")), "z");
}

TEST(HookBudget, BudgetIsPerTopLevelCall) {
  FactoryConfig small;
  small.recursion_budget = 50;
  Runtime rt = test::load_builtin("nat", small);
  const Factory& f = *rt.factory;
  NodeRef n = f.parse("zero");
  for (int i = 0; i < 30; ++i) n = f.build("suc", {n});
  // Each plus step re-enters the pipeline twice, so six additions of five
  // fit in a budget of 50 only if nothing carries over between calls.
  NodeRef total = f.parse("zero");
  for (int i = 0; i < 6; ++i) total = f.build("plus", {total, f.parse("suc(suc(suc(suc(suc(zero)))))")});
  EXPECT_EQ(rt.store->print_term(total), rt.store->print_term(n));
  EXPECT_THROW(f.build("plus", {n, n}), Error);
}

TEST(HookStages, MakeBeforeRewritesArguments) {
  Runtime rt = load_runtime(R"(module Pairs
    sorts N
    abstract syntax
      z -> N
      s(p:N) -> N
      pair(l:N, r:N) -> N
      pair:make_before(l, r) {
        s(x), z -> (r, l);
      }
  )");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("pair(s(z),z)")), "pair(z,s(z))");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("pair(z,s(z))")), "pair(z,s(z))");
}

TEST(HookStages, MakeAfterSeesFields) {
  Runtime rt = load_runtime(R"(module Mod2
    sorts N
    abstract syntax
      z -> N
      s(p:N) -> N
      s:make_after(p) {
        s(x) -> x;
      }
  )");
  // s(s(x)) collapses after construction, so values are taken modulo 2.
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("s(s(s(z)))")), "s(z)");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("s(s(z))")), "z");
}

TEST(HookStages, InsertStagesOnLists) {
  Runtime rt = load_runtime(R"(module Sets
    sorts E L
    abstract syntax
      a -> E
      b -> E
      set(E*) -> L
      set:make_before_insert(e, l) {
        x, set(x, t*) -> (x, set(t*));
      }
      set:make_after_insert(e, l) {
        b, rest -> rest;
      }
  )");
  // The before stage drops a duplicate head, the after stage drops b.
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("set(a,a)")), "set(a)");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("set(a,a,b,a,b)")), "set(a)");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("set(b)")), "set()");
}

TEST(HookStages, ResultSortMustMatch) {
  Runtime rt = load_runtime(R"(module Sorts
    sorts S T
    abstract syntax
      s -> S
      t -> T
      g(x:S) -> S
      g:make(x) { _ -> t; }
  )");
  try {
    rt.factory->parse("g(s)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SortMismatch);
  }
}

TEST(HookStages, ParamsAreBoundInEveryClause) {
  Runtime rt = load_runtime(R"(module Params
    sorts N
    abstract syntax
      z -> N
      s(p:N) -> N
      twice(n:N) -> N
      twice:make(n) {
        z -> n;
        s(p) -> s(s(twice(p)));
      }
  )");
  EXPECT_EQ(rt.store->print_term(rt.factory->parse("twice(s(s(z)))")), "s(s(s(s(z))))");
  try {
    load_runtime(R"(module Unbound
      sorts N
      abstract syntax
        z -> N
        s(p:N) -> N
        s:make(n) { z -> m; }
    )");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidModule);
  }
}

TEST(FactoryConstruction, RejectsInvalidModules) {
  auto m = std::make_shared<SignatureModule>(parse_module("module M sorts S abstract syntax f(x:Missing) -> S"));
  auto good = std::make_shared<SignatureModule>(parse_module("module M sorts S abstract syntax z -> S"));
  TermStore store(std::make_shared<Signature>(*good));
  try {
    Factory f(m, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidModule);
  }
  auto other = std::make_shared<SignatureModule>(parse_module("module M sorts S abstract syntax y -> S"));
  try {
    Factory f(other, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StoreMismatch);
  }
}

}  // namespace
}  // namespace gom
