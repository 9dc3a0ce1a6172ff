// Microbenchmarks for the hot paths: barrier evaluation, the wide-stencil
// operator, one explicit step, and a small end-to-end solve.
#include <benchmark/benchmark.h>

#include "ma/barrier.hpp"
#include "ma/solver.hpp"

namespace {

using namespace ma;

ConvexDomain unit_disk() { return ConvexDomain::disk(Vec::Zero(2), 1.0); }

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

void bench_barrier_eval(benchmark::State& state) {
  const auto dom = unit_disk();
  const auto p = build_barrier(dom, 2, 1.0, 1.0, 4.0, 2.0, v2(0, -1));
  const Vec x = v2(0.1, -0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_W(p, x));
    benchmark::DoNotOptimize(det_D2W(p, x));
  }
}
BENCHMARK(bench_barrier_eval);

void bench_ma_operator(benchmark::State& state) {
  const auto g = build_grid(unit_disk(), 1.0 / state.range(0), 2);
  const auto u = sample(g, [](const Eigen::Vector2d& p) {
    return 0.5 * (p.squaredNorm() - 1.0);
  });
  for (auto _ : state) benchmark::DoNotOptimize(ma_operator(u));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(g->interior_nodes().size()));
}
BENCHMARK(bench_ma_operator)->Arg(16)->Arg(32)->Arg(64);

void bench_euler_step(benchmark::State& state) {
  const auto spec = RhsSpec::envelope(2, 1.0, 0.0, 3.0, 0.0);
  const auto g = build_grid(unit_disk(), 1.0 / state.range(0), 2);
  auto u = sample(g, [](const Eigen::Vector2d& p) {
    return 0.5 * (p.squaredNorm() - 1.0);
  });
  impose_boundary(u);
  const double dt = 1e-5;
  for (auto _ : state) benchmark::DoNotOptimize(euler_step(u, spec, dt, 1e-10));
}
BENCHMARK(bench_euler_step)->Arg(16)->Arg(32);

void bench_solve_flat(benchmark::State& state) {
  const auto spec = RhsSpec::envelope(2, 1.0, 0.0, 3.0, 0.0);
  SolveConfig cfg;
  cfg.h = 1.0 / 8.0;
  cfg.tolerance = 1e-6;
  cfg.scheme = Scheme::NewtonAfterEuler;
  for (auto _ : state) benchmark::DoNotOptimize(solve(unit_disk(), spec, cfg));
}
BENCHMARK(bench_solve_flat)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
