#include <benchmark/benchmark.h>

#include <complex>

#include "hagerlab/dense_matrix.hpp"
#include "hagerlab/theory.hpp"

namespace {

using namespace hagerlab;

const FourierSymbol& model_symbol() {
  static const FourierSymbol g({{-1, Complex(1.0, 0.0)}});
  return g;
}

void BM_Action(benchmark::State& state) {
  const FourierSymbol& g = model_symbol();
  double y = -0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.action(y).s);
    y = y < 0.4 ? y + 1e-4 : -0.4;
  }
}
BENCHMARK(BM_Action);

void BM_DensityComponents(benchmark::State& state) {
  const FourierSymbol& g = model_symbol();
  const ModelParams p = ModelParams::from_epsilon0(0.05, 0.925);
  double y = -0.45;
  for (auto _ : state) {
    benchmark::DoNotOptimize(density_components(g, p, Complex(0.1, y)).density);
    y = y < 0.45 ? y + 1e-4 : -0.45;
  }
}
BENCHMARK(BM_DensityComponents);

void BM_AssembleOperator(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_operator(model_symbol(), 0.05, n).data());
}
BENCHMARK(BM_AssembleOperator)->Arg(100)->Arg(400)->Arg(800);

void BM_Eigenvalues(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  GaussianStream stream(7);
  const ComplexDenseMatrix a = sample_gaussian(dim, stream);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(a).size());
}
BENCHMARK(BM_Eigenvalues)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SmallestSingularDense(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  GaussianStream stream(11);
  const ComplexDenseMatrix a = sample_gaussian(dim, stream);
  for (auto _ : state)
    benchmark::DoNotOptimize(smallest_singular_values(a, Complex(0.1, 0.1), 2)[0]);
}
BENCHMARK(BM_SmallestSingularDense)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SmallestSingularBidiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexDenseMatrix op = assemble_operator(model_symbol(), 0.05, n);
  for (auto _ : state)
    benchmark::DoNotOptimize(smallest_singular_values(op, Complex(0.1, 0.4), 2)[0]);
}
BENCHMARK(BM_SmallestSingularBidiagonal)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_GaussianMatrix(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  GaussianStream stream(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_gaussian(dim, stream).data());
}
BENCHMARK(BM_GaussianMatrix)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
