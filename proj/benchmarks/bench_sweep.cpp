#include <benchmark/benchmark.h>

#include <random>

#include "itc/hamiltonian.hpp"

namespace {

using namespace itc;

ProblemSpec interacting(int particles) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vec> pts;
  for (int k = 0; k < particles; ++k) {
    Vec x(1);
    x[0] = dist(rng);
    pts.push_back(std::move(x));
  }
  ProblemSpec spec;
  spec.n = spec.m = 1;
  spec.horizon = 1.0;
  spec.budget = 0.5;
  spec.drift = std::make_shared<TanhField>(Vec::Constant(1, 0.4), 1.0);
  spec.kernel = builtin_attraction_repulsion(1, 0.4, 1.0, 0.5, 0.5);
  spec.controls = {std::make_shared<TanhField>(Vec::Constant(1, 1.2), 0.8)};
  spec.cost = std::make_shared<TanhCost>(Vec::Ones(1));
  spec.theta = EmpiricalMeasure(std::move(pts));
  spec.sup_c = 4.0;
  spec.lipschitz_l = 4.0;
  return spec;
}

void ForwardSolve(benchmark::State& state) {
  auto spec = interacting(static_cast<int>(state.range(0)));
  auto ctrl = ReducedControl::constant(spec.s_length(), 100, 0.6, Vec::Constant(1, 0.2));
  for (auto _ : state) benchmark::DoNotOptimize(solve_forward(spec, ctrl));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(ForwardSolve)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BackwardSweep(benchmark::State& state) {
  auto spec = interacting(static_cast<int>(state.range(0)));
  auto ctrl = ReducedControl::constant(spec.s_length(), 100, 0.6, Vec::Constant(1, 0.2));
  auto traj = solve_forward(spec, ctrl);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_backward(spec, ctrl, traj));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BackwardSweep)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void CellQuadrature(benchmark::State& state) {
  auto spec = interacting(static_cast<int>(state.range(0)));
  auto ctrl = ReducedControl::constant(spec.s_length(), 100, 0.6, Vec::Constant(1, 0.2));
  auto traj = solve_forward(spec, ctrl);
  auto lifted = solve_backward(spec, ctrl, traj);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_cell_hamiltonians(spec, ctrl, traj, lifted));
}
BENCHMARK(CellQuadrature)->RangeMultiplier(2)->Range(8, 64);

}  // namespace
