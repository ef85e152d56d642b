#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "gom/bv_prover.hpp"
#include "gom/corpus.hpp"
#include "gom/factory.hpp"
#include "gom/matcher.hpp"

namespace {

gom::Runtime builtin(std::string_view name) { return gom::load_runtime(*gom::corpus::builtin_module(name)); }

// Re-interning an existing chain only hits the hash table.
void BM_InternChain(benchmark::State& state) {
  const gom::Runtime rt = builtin("nat");
  const gom::Factory& f = *rt.factory;
  const gom::OpId suc = f.op("suc");
  const gom::NodeRef zero = f.parse("zero");
  for (auto _ : state) {
    gom::NodeRef n = zero;
    for (int i = 0; i < state.range(0); ++i) n = f.build(suc, std::span(&n, 1));
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InternChain)->Arg(100)->Arg(1000);

// Sorted insertion through the struct hooks, elements in reverse order.
void BM_SortedInsert(benchmark::State& state) {
  const gom::Runtime rt = builtin("struct");
  const gom::Factory& f = *rt.factory;
  std::vector<gom::NodeRef> atoms;
  for (const char* a : {"a", "b", "c", "d"}) {
    atoms.push_back(f.parse(a));
    atoms.push_back(f.parse(std::string("neg(") + a + ")"));
  }
  std::vector<gom::NodeRef> elems;
  for (int i = 0; i < state.range(0); ++i) elems.push_back(atoms[(atoms.size() - 1) - i % atoms.size()]);
  const gom::OpId conc = f.op("concPar");
  for (auto _ : state) benchmark::DoNotOptimize(f.build_variadic(conc, elems));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SortedInsert)->Arg(8)->Arg(32);

void BM_MatchAll(benchmark::State& state) {
  const gom::Runtime rt = builtin("nat");
  const gom::Factory& f = *rt.factory;
  const gom::Pattern p = gom::parse_pattern("conc(X1*,x,X2*,x,X3*)", f.signature());
  std::string text = "conc(";
  for (int i = 0; i < state.range(0); ++i) text += std::string(i ? "," : "") + (i % 2 ? "zero" : "suc(zero)");
  const gom::NodeRef subject = f.parse(text + ")");
  for (auto _ : state) benchmark::DoNotOptimize(gom::match_all(*rt.store, p, subject));
}
BENCHMARK(BM_MatchAll)->Arg(8)->Arg(32);

void BM_Prove(benchmark::State& state) {
  const gom::Runtime rt = builtin("struct");
  const gom::Factory& f = *rt.factory;
  const gom::bv::Prover prover(f);
  const gom::NodeRef goal = f.parse("par(concPar(seq(concSeq(a,b)),seq(concSeq(neg(a),neg(b)))))");
  gom::bv::SearchConfig cfg;
  cfg.can_react_pruning = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(prover.prove(goal, cfg));
}
BENCHMARK(BM_Prove)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
