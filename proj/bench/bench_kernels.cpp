// Serial reference kernels vs their OpenMP versions on free 2D generators.
//
//   ./bench_kernels --benchmark_filter=Matvec

#include <benchmark/benchmark.h>

#include <random>

#include "lathop/generator.hpp"
#include "lathop/kernels.hpp"
#include "lathop/synthesis.hpp"

namespace {

using namespace lathop;

Generator square_generator(int side) {
  return build_generator(synthesize_free(1.0, Lattice(2, side, 0.1), 4));
}

std::vector<cplx> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

void BM_MatvecSerial(benchmark::State& st) {
  const Generator g = square_generator(static_cast<int>(st.range(0)));
  const auto x = random_vector(g.dimension());
  std::vector<cplx> y(x.size());
  for (auto _ : st) {
    kernels::serial::matvec(g.matrix(), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(g.nnz()));
}

void BM_MatvecParallel(benchmark::State& st) {
  const Generator g = square_generator(static_cast<int>(st.range(0)));
  const auto x = random_vector(g.dimension());
  std::vector<cplx> y(x.size());
  for (auto _ : st) {
    kernels::matvec(g.matrix(), x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(g.nnz()));
}

void BM_DotSerial(benchmark::State& st) {
  const auto a = random_vector(static_cast<std::size_t>(st.range(0)));
  const auto b = random_vector(a.size());
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::dot(a, b));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_DotParallel(benchmark::State& st) {
  const auto a = random_vector(static_cast<std::size_t>(st.range(0)));
  const auto b = random_vector(a.size());
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dot(a, b));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// range(1) is the thread count; 1 thread is the serial baseline for the step
void BM_CrankNicolsonStep(benchmark::State& st) {
  const Generator g = square_generator(static_cast<int>(st.range(0)));
  kernels::set_threads(static_cast<int>(st.range(1)));
  WaveField psi(g.lattice(), random_vector(g.dimension()));
  psi.normalize();
  for (auto _ : st) {
    psi = step_crank_nicolson(psi, g, 1e-3);
    benchmark::DoNotOptimize(psi.data().data());
  }
  kernels::set_threads(kernels::max_threads());
}

}  // namespace

BENCHMARK(BM_MatvecSerial)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_MatvecParallel)->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_DotSerial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DotParallel)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_CrankNicolsonStep)->Args({128, 1})->Args({128, 4})->Args({256, 1})->Args({256, 4});

BENCHMARK_MAIN();
