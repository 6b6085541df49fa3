// Serial reference against the OpenMP sample kernel for the rescaled return-map batch.
#include <benchmark/benchmark.h>

#include "example.hpp"
#include "polyskel/verify.hpp"

using namespace testing;

namespace {

void run_batch(benchmark::State& state, bool parallel) {
  Example ex;
  AsymptoticsOptions o;
  o.samples = static_cast<std::size_t>(state.range(0));
  o.parallel = parallel;
  for (auto _ : state) {
    auto t = verify_asymptotics(ex.game, ex.chi, ex.graph, ex.plm, 2, o);
    benchmark::DoNotOptimize(t.rows.back().max_error);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(o.samples * o.eps.size()));
}

void BM_AsymptoticsSerial(benchmark::State& state) { run_batch(state, false); }
void BM_AsymptoticsParallel(benchmark::State& state) { run_batch(state, true); }

void run_agreement(benchmark::State& state, bool parallel) {
  Example ex;
  AgreementOptions o;
  o.parallel = parallel;
  for (auto _ : state) {
    auto r = oracle_agreement(ex.game, ex.chi, ex.graph, ex.plm, kG5, o);
    benchmark::DoNotOptimize(r.agree);
  }
}

void BM_AgreementSerial(benchmark::State& state) { run_agreement(state, false); }
void BM_AgreementParallel(benchmark::State& state) { run_agreement(state, true); }

}  // namespace

BENCHMARK(BM_AsymptoticsSerial)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AsymptoticsParallel)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AgreementSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AgreementParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
