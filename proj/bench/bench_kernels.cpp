// Serial reference against the OpenMP kernels. Arg 0 is serial, 1 parallel.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "fairck/sweep.hpp"
#include "fairck/syntax.hpp"
#include "fairck/witness.hpp"

using namespace fairck;

namespace {

void BM_Selftest(benchmark::State& state) {
  SelftestOptions opt;
  opt.parallel = state.range(0) != 0;
  opt.random_count = 200;
  for (auto _ : state) {
    SelftestReport r = run_selftest(opt);
    benchmark::DoNotOptimize(r.tally.configs);
  }
  state.SetLabel(opt.parallel ? "parallel" : "serial");
}

void BM_Soundness(benchmark::State& state) {
  SoundnessOptions opt;
  opt.parallel = state.range(0) != 0;
  opt.pairs = 50;
  for (auto _ : state) {
    SoundnessReport r = run_subtyping_soundness(opt);
    benchmark::DoNotOptimize(r.fair_clients);
  }
  state.SetLabel(opt.parallel ? "parallel" : "serial");
}

// The discriminating client has to steer S around its loop before S refuses
// b; tens of thousands of candidates come first.
void BM_Synthesis(benchmark::State& state) {
  SessionSystem sys = syntax::load(
      "alphabet {a, b, c}\n"
      "type T = !{a,b,c}.T\n"
      "type S = !a.P1\n"
      "type P1 = !{a,c}.P2 + !b.P1\n"
      "type P2 = !a.P3 + !c.P1\n"
      "type P3 = !a.P1\n");
  SynthOptions opt;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) {
    ClientSpec c = synth_discriminating_client(sys, sys.resolve("T"), sys.resolve("S"), opt);
    benchmark::DoNotOptimize(c.candidates);
    state.counters["candidates"] = static_cast<double>(c.candidates);
  }
  state.SetLabel(opt.parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_Selftest)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Soundness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Synthesis)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
}
