#include <benchmark/benchmark.h>

#include "janossy/janossy_kernel.hpp"
#include "janossy/kernels.hpp"
#include "janossy/models.hpp"
#include "janossy/oracle.hpp"

using namespace janossy;

namespace {

ChainEnsemble chain(int order, Precision precision) {
  CoupledChainSpec spec;
  spec.n = 4;
  spec.potentials = {Potential::gaussian(), Potential::gaussian(), Potential::gaussian()};
  spec.couplings = {0.3, 0.3};
  spec.space = SpaceSpec::quadrature({-6.0, 6.0}, order);
  EnsembleOptions opts;
  opts.precision = precision;
  return build_coupled_chain(spec, opts);
}

void BM_build_chain(benchmark::State& state) {
  const auto p = state.range(1) ? Precision::extended : Precision::standard;
  for (auto _ : state) benchmark::DoNotOptimize(chain(static_cast<int>(state.range(0)), p).gram());
}
BENCHMARK(BM_build_chain)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_correlation_kernel(benchmark::State& state) {
  const auto e = chain(static_cast<int>(state.range(0)), state.range(1) ? Precision::extended : Precision::standard);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_kernel(e).block(0, 2));
}
BENCHMARK(BM_correlation_kernel)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_janossy_explicit_vs_resolvent(benchmark::State& state) {
  const auto e = chain(64, Precision::standard);
  const auto wf = WindowFamily::uniform(Window::at_or_above(e.space(), 1.0), e.floors());
  const auto k = correlation_kernel(e);
  for (auto _ : state) {
    if (state.range(0)) {
      benchmark::DoNotOptimize(resolvent_kernel(k, wf).block(0, 0));
    } else {
      benchmark::DoNotOptimize(janossy_kernel_explicit(e, wf).normalization);
    }
  }
}
BENCHMARK(BM_janossy_explicit_vs_resolvent)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_fredholm_det(benchmark::State& state) {
  auto space = DiscretizedSpace::quadrature({-6.0, 6.0}, static_cast<int>(state.range(0)));
  const auto k = correlation_kernel(build_unitary(Potential::gaussian(), 6, space));
  const auto op = restrict_to(k, WindowFamily({Window::at_or_above(space, 0.5)}));
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_det(op));
}
BENCHMARK(BM_fredholm_det)->Arg(64)->Arg(256)->Arg(512);

void BM_enumerate(benchmark::State& state) {
  const auto e = build_random(1, 5, 2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_density(e).raw_partition());
}
BENCHMARK(BM_enumerate)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
