#include <benchmark/benchmark.h>

#include "pintoc/algorithms.hpp"
#include "pintoc/experiment.hpp"
#include "pintoc/parareal.hpp"

namespace {

pintoc::ControlProblem desk_problem(int n, int steps) {
  pintoc::Grid grid(n, n);
  auto time = pintoc::TimeGrid::from_steps(1.6, steps);
  return pintoc::ControlProblem(
      grid, time, 1e-2, 1e-2, pintoc::make_profile(grid, "zero"),
      pintoc::make_profile(grid, "gaussian(0.5,0.5,0.15,1.0)"));
}

void BM_ForwardSolve(benchmark::State& state) {
  auto pb = desk_problem(static_cast<int>(state.range(0)), 64);
  auto v = pintoc::zero_control(pb.grid, pb.full_window());
  for (auto _ : state) {
    pintoc::OpCounter c;
    auto y = pintoc::forward_solve(*pb.op, pb.grid, pb.time.dt, pb.y0, v,
                                   pb.full_window(), c);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_ForwardSolve)->Arg(9)->Arg(31);

void BM_GradientApply(benchmark::State& state) {
  auto pb = desk_problem(static_cast<int>(state.range(0)), 64);
  auto v = pintoc::zero_control(pb.grid, pb.full_window());
  for (auto _ : state) {
    pintoc::OpCounter c;
    auto g = pintoc::gradient(pb, v, c);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_GradientApply)->Arg(9)->Arg(31);

void BM_SitpocIterate(benchmark::State& state) {
  auto pb = desk_problem(9, 64);
  auto sub = pintoc::subdivide(pb.time, static_cast<int>(state.range(0)));
  auto v = pintoc::zero_control(pb.grid, pb.full_window());
  for (auto _ : state) {
    pintoc::CounterPair counters;
    auto step = pintoc::sitpoc_iterate(pb, v, sub, 1, 4, counters);
    benchmark::DoNotOptimize(step);
  }
}
BENCHMARK(BM_SitpocIterate)->Arg(2)->Arg(8);

void BM_PararealForwardSweep(benchmark::State& state) {
  auto pb = desk_problem(9, 64);
  auto sub = pintoc::subdivide(pb.time, static_cast<int>(state.range(0)));
  auto v = pintoc::zero_control(pb.grid, pb.full_window());
  pintoc::CounterPair init;
  auto st = pintoc::pitpoc_init(pb, sub, 1, v, init);
  for (auto _ : state) {
    pintoc::CounterPair counters;
    auto lam = pintoc::parareal_forward_sweep(pb, sub, 1, st.lambdas, v, v, 4,
                                              counters);
    benchmark::DoNotOptimize(lam);
  }
}
BENCHMARK(BM_PararealForwardSweep)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
