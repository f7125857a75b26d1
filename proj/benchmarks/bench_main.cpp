#include "nil3/asymptotic_solver.hpp"
#include "nil3/graph_operator.hpp"
#include "nil3/heisenberg.hpp"
#include "nil3/plateau.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nil3;

static void BM_GeodesicPoint(benchmark::State& state) {
  GeodesicParams gp = GeodesicParams::from_direction(0.7, 0.4);
  Nil3Point p0{0.3, -0.2, 0.5};
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(geodesic_point(p0, gp, t));
  }
}
BENCHMARK(BM_GeodesicPoint);

static void BM_CompactifiedH(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  DiskJet2 j{0.6, 1.0, U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
  for (auto _ : state) {
    j.theta += 1e-6;
    benchmark::DoNotOptimize(compactified_H(j));
  }
}
BENCHMARK(BM_CompactifiedH);

static void BM_CompactifiedHDirect(benchmark::State& state) {
  DiskJet2 j{0.6, 1.0, 0.2, -0.1, 0.3, 0.05, -0.2, 0.1};
  for (auto _ : state) {
    j.theta += 1e-6;
    benchmark::DoNotOptimize(compactified_H_direct(j));
  }
}
BENCHMARK(BM_CompactifiedHDirect);

static void BM_JacobiApply(benchmark::State& state) {
  const int nr = static_cast<int>(state.range(0));
  ScalarDiskField f = phi0_field(nr, 4 * nr);
  jacobi_apply(f);  // builds the cached stencils
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_apply(f));
  state.SetComplexityN(nr * 4 * nr);
}
BENCHMARK(BM_JacobiApply)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_SolveMinimalGraph(benchmark::State& state) {
  const int nr = static_cast<int>(state.range(0));
  SolverConfig cfg;
  cfg.nr = nr;
  cfg.ntheta = 4 * nr;
  BoundaryData g = BoundaryData::sine(cfg.ntheta, 2, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(solve_minimal_graph(g, 0.0, cfg));
}
BENCHMARK(BM_SolveMinimalGraph)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_MeshAreaGradient(benchmark::State& state) {
  TriMesh3 m = initial_spanning_mesh(build_contour(1.0, 4.0, 2, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(mesh_area_gradient(m));
  state.counters["triangles"] = static_cast<double>(m.num_triangles());
}
BENCHMARK(BM_MeshAreaGradient)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

static void BM_PlateauMinimize(benchmark::State& state) {
  TriMesh3 m = initial_spanning_mesh(build_contour(1.0, 4.0, 2, static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(minimize_area(m, MinimizeConfig{}));
}
BENCHMARK(BM_PlateauMinimize)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
