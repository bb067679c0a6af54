#include <benchmark/benchmark.h>

#include "navflow/navflow.hpp"

using namespace navflow;

namespace {

World world(std::size_t m) {
  GenConfig g;
  g.m = m;
  g.seed = 42;
  return gen_world_2d(g);
}

std::vector<Vector> free_points(const World& w, std::size_t count) {
  Rng rng(7);
  std::vector<Vector> pts;
  while (pts.size() < count) {
    Vector x(2);
    x << rng.uniform(-20, 20), rng.uniform(-20, 20);
    if (in_free_space(w, x)) pts.push_back(x);
  }
  return pts;
}

template <class F>
void field_bench(benchmark::State& state, F&& field) {
  const World w = world(static_cast<std::size_t>(state.range(0)));
  const auto pts = free_points(w, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field(w, pts[i++ & 255]));
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_GNav(benchmark::State& s) { field_bench(s, [](const World& w, const Vector& x) { return g_nav(w, 40, x); }); }
void BM_GNew(benchmark::State& s) { field_bench(s, [](const World& w, const Vector& x) { return g_new(w, 40, x); }); }
void BM_GOld(benchmark::State& s) {
  field_bench(s, [](const World& w, const Vector& x) { return g_old(w, FlowParams{40}, x); });
}
void BM_GradPhi(benchmark::State& s) {
  field_bench(s, [](const World& w, const Vector& x) { return grad_phi_k(w, 40, x); });
}

void BM_ConvexDistance(benchmark::State& state) {
  const World w = world(7);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t a = i % 7, b = (i / 7 + a + 1) % 7;
    ++i;
    if (a == b) continue;
    benchmark::DoNotOptimize(
        convex_distance(ConvexSet::of(w.obstacle(a)), ConvexSet::hull(w.obstacle(b), w.target())).distance);
  }
}

void BM_ConfigGraph(benchmark::State& state) {
  const World w = world(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_config_graph(w).edges.size());
}

void BM_Run(benchmark::State& state) {
  GenConfig g;
  g.m = 5;
  g.seed = 42;
  const World w = gen_world_2d(g);
  const Vector x0 = gen_start(w, g);
  SimConfig cfg;
  cfg.flow = static_cast<Dynamics>(state.range(0));
  cfg.k = 40;
  std::size_t steps = 0;
  for (auto _ : state) {
    const Trajectory t = run(w, cfg, x0);
    steps += t.steps;
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
  state.SetLabel(to_string(cfg.flow));
}

}  // namespace

BENCHMARK(BM_GNav)->Arg(2)->Arg(7)->Arg(20);
BENCHMARK(BM_GNew)->Arg(2)->Arg(7)->Arg(20);
BENCHMARK(BM_GOld)->Arg(2)->Arg(7)->Arg(20);
BENCHMARK(BM_GradPhi)->Arg(2)->Arg(7)->Arg(20);
BENCHMARK(BM_ConvexDistance);
BENCHMARK(BM_ConfigGraph)->Arg(3)->Arg(7);
BENCHMARK(BM_Run)
    ->Arg(static_cast<int>(Dynamics::kNavFn))
    ->Arg(static_cast<int>(Dynamics::kSecondOrder))
    ->Arg(static_cast<int>(Dynamics::kCurvatureCorrected))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
