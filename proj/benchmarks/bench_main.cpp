#include <benchmark/benchmark.h>

#include <random>

#include "hexmask/hexfem.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/skeleton.hpp"

using namespace hexmask;

namespace {

// Left edge clamped, unit force at the bottom-right corner.
FEModel cantilever(int cols, int rows) {
  auto g = std::make_shared<const HexGrid>(HexGrid::build(cols, rows, 1.0));
  FEModel m = FEModel::make(g);
  const Box b = g->bounds();
  int corner = 0;
  double best = 1e300;
  for (int n = 0; n < g->num_nodes(); ++n) {
    const Vec2 p = g->node(n);
    if (g->is_boundary_node(n) && p.x <= b.xmin + 0.5 * g->pitch() + 1e-9) {
      m.fix(2 * n);
      m.fix(2 * n + 1);
    }
    const double d = distance(p, {b.xmax, b.ymin});
    if (d < best) best = d, corner = n;
  }
  m.add_force(2 * corner + 1, -1.0);
  return m;
}

MaskSet layout(const HexGrid& g) {
  return even_layout(g.bounds(), g.n_cols() / 8, g.n_rows() / 8, Polarity::negative, MaskShape::elliptical, 6.0, 3.0,
                     2.5);
}

void BM_FieldEvaluation(benchmark::State& st) {
  const auto g = HexGrid::build(st.range(0), st.range(0) / 2, 1.0);
  const auto ms = layout(g);
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_field(g, ms));
  st.SetItemsProcessed(st.iterations() * g.num_cells());
}
BENCHMARK(BM_FieldEvaluation)->Arg(60)->Arg(150);

void BM_Solve(benchmark::State& st) {
  Analysis an(cantilever(st.range(0), st.range(0) / 2));
  const auto f = evaluate_field(an.grid(), layout(an.grid()));
  for (auto _ : st) benchmark::DoNotOptimize(an.assemble_solve(f));
}
BENCHMARK(BM_Solve)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_ObjectiveAndGradient(benchmark::State& st) {
  Analysis an(cantilever(st.range(0), st.range(0) / 2));
  const auto ms = layout(an.grid());
  for (auto _ : st) benchmark::DoNotOptimize(objective_and_gradient(an, ms, ObjectiveKind::compliance, 1.0));
}
BENCHMARK(BM_ObjectiveAndGradient)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_Skeletonize(benchmark::State& st) {
  const auto g = HexGrid::build(st.range(0), st.range(0), 1.0);
  std::mt19937_64 rng(1);
  BinaryField f;
  f.filled.resize(g.num_cells());
  for (auto& v : f.filled) v = rng() % 3 != 0;
  for (auto _ : st) benchmark::DoNotOptimize(skeletonize(g, f));
}
BENCHMARK(BM_Skeletonize)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
