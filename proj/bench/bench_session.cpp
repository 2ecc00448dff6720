// Serial reference loop vs the OpenMP round loop on the same session.
// Set OMP_NUM_THREADS to vary the parallel side.

#include <benchmark/benchmark.h>

#include "qkdnet/session.hpp"

namespace {

using namespace qkdnet;

ProtocolConfig bench_protocol(int d, std::int64_t rounds) {
  ProtocolConfig p;
  p.d = d;
  p.n_rounds = static_cast<std::uint64_t>(rounds);
  p.p_bm = 0.8;
  p.p_cm = 0.5;
  p.p_d = 0.2;
  p.sample_fraction = 0.05;
  return p;
}

void run(benchmark::State& state, Execution ex, AttackKind kind) {
  const auto p = bench_protocol(static_cast<int>(state.range(0)), state.range(1));
  ChannelConfig c;
  c.mu = 0.1;
  c.eta_opt = 0.9;
  AdversaryStrategy a;
  a.kind = kind;
  SessionOptions o;
  o.execution = ex;
  for (auto _ : state) benchmark::DoNotOptimize(run_session(p, c, a, 1, o));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_SessionSerial(benchmark::State& s) { run(s, Execution::serial, AttackKind::none); }
void BM_SessionParallel(benchmark::State& s) { run(s, Execution::parallel, AttackKind::none); }
void BM_InterceptSerial(benchmark::State& s) { run(s, Execution::serial, AttackKind::intercept_resend_z); }
void BM_InterceptParallel(benchmark::State& s) { run(s, Execution::parallel, AttackKind::intercept_resend_z); }

}  // namespace

BENCHMARK(BM_SessionSerial)->Args({2, 100000})->Args({8, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SessionParallel)->Args({2, 100000})->Args({8, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InterceptSerial)->Args({4, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InterceptParallel)->Args({4, 100000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
