// Serial vs OpenMP slab assembly on the moving circle.
#include <omp.h>

#include <benchmark/benchmark.h>

#include "sttrace/solver.hpp"

namespace {

using namespace sttrace;

struct Fixture {
  AnalyticScene scene = make_moving_circle();
  MethodParams params;
  Triangulation mesh;
  TimeGrid grid;
  std::shared_ptr<const LagrangeNodes> nodes;
  std::optional<DiscreteLevelSet> ls;
  CutTopologySlab topo;
  std::optional<SpaceTimeDeformation> def;
  AlphaField alpha;
  std::optional<DofMap> dofmap;
  SlabQuadratures quad;

  Fixture(int k, int level)
      : mesh(build_structured_mesh(scene.domain(), 0.25)), grid(build_time_grid(1.0, 0.25, level)) {
    params.ks = params.kq = params.kgs = params.kgq = k;
    for (int i = 0; i < level; ++i) mesh = refine_uniform(mesh);
    nodes = std::make_shared<const LagrangeNodes>(mesh, k);
    ls.emplace(interpolate_levelset(scene, mesh, nodes, grid, 1, k));
    topo = detect_active(*ls);
    def.emplace(build_deformation(*ls, topo));
    dofmap.emplace(mesh, topo, nodes, k);
    quad = build_slab_quadratures(params, topo, *ls);
  }
  SlabContext context() const {
    return {&scene, &*ls, &topo, &*def, &alpha, &*dofmap, &quad};
  }
};

TraceFn unit_trace() {
  return [](int, const Vec2&) { return 1.0; };
}

void BM_AssembleSerial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SlabContext ctx = f.context();
  const TraceFn trace = unit_trace();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_slab_serial(f.params, ctx, trace));
  state.counters["elements"] = f.topo.size();
}

void BM_AssembleParallel(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const SlabContext ctx = f.context();
  const TraceFn trace = unit_trace();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_slab(f.params, ctx, trace));
  state.counters["elements"] = f.topo.size();
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_AssembleSerial)->Args({1, 3})->Args({2, 3})->Args({1, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Args({1, 3})->Args({2, 3})->Args({1, 5})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
