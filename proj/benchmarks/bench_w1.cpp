#include <benchmark/benchmark.h>

#include <random>

#include "itc/measures.hpp"

namespace {

itc::EmpiricalMeasure cloud(std::mt19937& rng, int count, int dim) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<itc::Vec> pts;
  for (int k = 0; k < count; ++k) {
    itc::Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = dist(rng);
    pts.push_back(std::move(x));
  }
  return itc::EmpiricalMeasure(std::move(pts));
}

void W1Sorted1D(benchmark::State& state) {
  std::mt19937 rng(1);
  auto a = cloud(rng, static_cast<int>(state.range(0)), 1);
  auto b = cloud(rng, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(itc::w1_distance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(W1Sorted1D)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void W1Assignment2D(benchmark::State& state) {
  std::mt19937 rng(2);
  auto a = cloud(rng, static_cast<int>(state.range(0)), 2);
  auto b = cloud(rng, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(itc::w1_distance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(W1Assignment2D)->RangeMultiplier(2)->Range(16, 256)->Complexity();

}  // namespace
