// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to vary
// the parallel side; the serial variants ignore it.

#include <benchmark/benchmark.h>

#include <random>

#include "codedmr/delay_model.hpp"
#include "codedmr/lagrange_code.hpp"
#include "codedmr/placement.hpp"
#include "codedmr/sim.hpp"

using namespace codedmr;

namespace {

const SystemConfig kK30{30, Rational(1, 2), 120, 600, 1, Rational(1), Rational(3, 4)};

void BM_MonteCarloSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(map_delay_monte_carlo_serial(kK30, 15, st.range(0), 1).mean);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_MonteCarloParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(map_delay_monte_carlo_parallel(kK30, 15, st.range(0), 1).mean);
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct EncodeInput {
  PrimeField field{2147483647};
  CodeParams params;
  std::vector<DataPoint> data;

  explicit EncodeInput(std::size_t m) : params(concatenated_params(field, 8, m, 2, 2, 4)) {
    std::mt19937_64 rng(3);
    data.assign(m, DataPoint(16));
    for (auto& row : data)
      for (auto& x : row) x = field.random(rng);
  }
};

void BM_EncodeSerial(benchmark::State& st) {
  const EncodeInput in(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(encode_serial(in.field, in.data, in.params).rows.size());
}

void BM_EncodeParallel(benchmark::State& st) {
  const EncodeInput in(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(encode_parallel(in.field, in.data, in.params).rows.size());
}

void BM_CoverageSerial(benchmark::State& st) {
  const auto p = assign_batches(18, 3, 1, binom(18, 3).get_ui());
  for (auto _ : st) benchmark::DoNotOptimize(coverage_check_bruteforce_serial(p, 9, 700, false));
}

void BM_CoverageParallel(benchmark::State& st) {
  const auto p = assign_batches(18, 3, 1, binom(18, 3).get_ui());
  for (auto _ : st) benchmark::DoNotOptimize(coverage_check_bruteforce_parallel(p, 9, 700, false));
}

void BM_SweepSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sweep_q_serial(Scheme::Superposition, kK30, Mode::Analytic).size());
}

void BM_SweepParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sweep_q_parallel(Scheme::Superposition, kK30, Mode::Analytic).size());
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EncodeParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
