#include <benchmark/benchmark.h>

#include <conelab/cone.hpp>
#include <conelab/decay.hpp>
#include <conelab/harmonics.hpp>
#include <conelab/linearization.hpp>

using namespace conelab;

static void BM_make_geometry(benchmark::State& st) {
  const GridPtr grid = Grid::sphere(int(st.range(0)), 2 * int(st.range(0)));
  FieldSampler fs(grid, 1);
  const Tensor h = fs.sym_tensor();
  const Tensor g = make_round_sphere(grid, 1.0) + (0.1 / h.max_abs()) * h;
  for (auto _ : st) benchmark::DoNotOptimize(make_geometry(grid, g));
}
BENCHMARK(BM_make_geometry)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_linearized_gradient(benchmark::State& st) {
  const GridPtr grid = Grid::sphere(int(st.range(0)), 2 * int(st.range(0)));
  const BackgroundData bg = BackgroundData::round(grid, 1.0);
  FieldSampler fs(grid, 2);
  const Tensor h = fs.sym_tensor();
  const Field v = fs.scalar();
  const TangentPair x{(0.1 / h.max_abs()) * h, (0.1 / v.abs().maxCoeff()) * v};
  for (auto _ : st) benchmark::DoNotOptimize(linearized_gradient(bg, x));
}
BENCHMARK(BM_linearized_gradient)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_york_decompose(benchmark::State& st) {
  const GridPtr grid = Grid::sphere(48, 96);
  const BackgroundData bg = BackgroundData::round(grid, 1.0);
  FieldSampler fs(grid, 3);
  const Tensor h = fs.sym_tensor();
  for (auto _ : st) benchmark::DoNotOptimize(york_decompose(h, bg));
}
BENCHMARK(BM_york_decompose)->Unit(benchmark::kMillisecond);

static void BM_solve_green_radial(benchmark::State& st) {
  const WarpedModel m = WarpedModel::tanh_warp(1.2, 0.9);
  for (auto _ : st) benchmark::DoNotOptimize(solve_green_radial(m).b_inf_estimate());
}
BENCHMARK(BM_solve_green_radial)->Unit(benchmark::kMillisecond);

static void BM_iterate_decay(benchmark::State& st) {
  const std::size_t jmax = std::size_t(st.range(0));
  const MonotoneSeq s = extremal_sequence(1.0, 0.5, 1.0, jmax + 2);
  for (auto _ : st) benchmark::DoNotOptimize(iterate_decay(s, 0.5, 1.0, 0, jmax).issued);
}
BENCHMARK(BM_iterate_decay)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_bootstrap(benchmark::State& st) {
  const AbstractInstance inst = forward_instance(0.5, std::size_t(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(bootstrap_uniqueness(inst).issued);
}
BENCHMARK(BM_bootstrap)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
