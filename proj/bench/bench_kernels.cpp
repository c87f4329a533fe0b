// Serial reference vs OpenMP kernels on the two data-parallel workloads:
// a conditioned-information grid sweep and a block of Monte Carlo trials.

#include <benchmark/benchmark.h>

#include "tiltsense/estimate.hpp"
#include "tiltsense/fisher.hpp"
#include "tiltsense/parallel.hpp"

using namespace tiltsense;

namespace {

const BeamParams kBeam = BeamParams::from_wavelength(633e-9, 1e-3, 1e-3);

double sweep_point(std::size_t i) {
  const double zr = kBeam.rayleigh_range();
  const double z = 10.0 * zr * static_cast<double>(i % 64) / 63.0;
  const double x = -3e-3 + 6e-3 * static_cast<double>(i / 64) / 63.0;
  return fisher_conditioned(kBeam, z, x, 1e-6) + fisher_quadrant(kBeam, 1e-6, z);
}

void BM_SweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(seq::map_indexed(4096, sweep_point));
}

void BM_SweepParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(par::map_indexed(4096, sweep_point, threads));
}

void BM_DecompositionSweep(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const double zr = kBeam.rayleigh_range();
  for (auto _ : state) {
    benchmark::DoNotOptimize(par::map_indexed(
        16,
        [&](std::size_t i) {
          return fisher_total_decomposition(kBeam, zr * static_cast<double>(i) / 4.0, 1e-6).total;
        },
        threads));
  }
}

MonteCarloPlan quadrant_plan() {
  const double z = 5.0 * kBeam.rayleigh_range();
  const double f = fisher_quadrant(kBeam, 1e-6, z);
  return {1e-6, 10000, 64, 7, {0.5e-6, 1.5e-6}, f};
}

void BM_TrialsSerial(benchmark::State& state) {
  const SchemeModel model(kBeam, Quadrant{5.0 * kBeam.rayleigh_range()});
  const MonteCarloPlan plan = quadrant_plan();
  for (auto _ : state) benchmark::DoNotOptimize(seq::run_trials(model, plan));
}

void BM_TrialsParallel(benchmark::State& state) {
  const SchemeModel model(kBeam, Quadrant{5.0 * kBeam.rayleigh_range()});
  const MonteCarloPlan plan = quadrant_plan();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(par::run_trials(model, plan, threads));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecompositionSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
