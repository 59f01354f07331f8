// Serial reference kernels vs their OpenMP counterparts. Both paths produce
// bitwise identical output (checked in the unit tests), so only time differs.

#include <benchmark/benchmark.h>

#include "mpet/assembly.hpp"
#include "mpet/benchmarks.hpp"

namespace {

using namespace mpet;

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? ExecPolicy::Parallel : ExecPolicy::Serial;
}

void BM_AssembleSystem(benchmark::State& state) {
  const Mesh m = Mesh::structured(static_cast<int>(state.range(0)));
  const auto rp = RescaledParameters::direct(1e4, {1e2, 1.0}, {1e-4, 0.0});
  AssemblyConfig cfg;
  cfg.policy = policy_of(state);
  for (auto _ : state) {
    const BlockSystem sys(m, rp, BoundaryConditions::clamped(2), cfg);
    benchmark::DoNotOptimize(sys.matrix.nonZeros());
  }
  state.counters["cells"] = m.num_cells();
}

void BM_Spmv(benchmark::State& state) {
  const Mesh m = Mesh::structured(static_cast<int>(state.range(0)));
  const BlockSystem sys(m, RescaledParameters::direct(1e4, {1e2}, {1e-4}), BoundaryConditions::clamped(1), {});
  const DenseVector x = DenseVector::LinSpaced(sys.size(), -1.0, 1.0);
  DenseVector y(sys.size());
  const ExecPolicy policy = policy_of(state);
  for (auto _ : state) {
    spmv(sys.matrix, x.data(), y.data(), policy);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = static_cast<double>(sys.matrix.nonZeros());
  state.counters["threads"] = policy == ExecPolicy::Parallel ? max_threads() : 1;
}

// range(0) = mesh subdivisions N, range(1) = 0 serial / 1 parallel.
BENCHMARK(BM_AssembleSystem)->ArgsProduct({{16, 32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Spmv)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
