#include <benchmark/benchmark.h>

#include <cmath>

#include "ms4/catalog.hpp"
#include "ms4/monodromy.hpp"

using namespace ms4;

namespace {

void BM_AnalyzeSurface(benchmark::State& state) {
  const ImmersionField imm = clifford_torus(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(analyze_surface(imm));
}
BENCHMARK(BM_AnalyzeSurface)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LaplaceBeltrami(benchmark::State& state) {
  const SurfaceGeometry g = analyze_surface(veronese_sphere(state.range(0), state.range(0)));
  const RealField f = g.report.K.map([](double x) { return std::log(1.0 + x); });
  for (auto _ : state) benchmark::DoNotOptimize(laplace_beltrami(f, g.metric()));
}
BENCHMARK(BM_LaplaceBeltrami)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IntegrateFrame(benchmark::State& state) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(state.range(0), state.range(0)));
  const MaurerCartanFamily fam = assemble_family(g);
  const Mat5 seed = frame_matrices(g)[0];
  for (auto _ : state) benchmark::DoNotOptimize(integrate_frame(OmegaSource(fam, 0.3), seed));
}
BENCHMARK(BM_IntegrateFrame)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ThetaScan(benchmark::State& state) {
  const SurfaceGeometry g = analyze_surface(clifford_torus(256, 256));
  const MaurerCartanFamily fam = assemble_family(g);
  ScanOptions opts;
  opts.n_theta = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_profile(g, fam, opts));
}
BENCHMARK(BM_ThetaScan)->Arg(72)->Arg(720)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
