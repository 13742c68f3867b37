// Serial reference kernels against their OpenMP counterparts.
//   ./bench_kernels --benchmark_filter=dot
// Set OMP_NUM_THREADS to control the parallel side.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rok/kernels.hpp"

namespace k = rok::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Omp>
void BM_dot(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vector(n, 1), y = random_vector(n, 2);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? k::omp::dot(x, y) : k::serial::dot(x, y));
  st.SetBytesProcessed(static_cast<int64_t>(st.iterations() * 2 * n * sizeof(double)));
}

template <bool Omp>
void BM_nrm2(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vector(n, 3);
  for (auto _ : st) benchmark::DoNotOptimize(Omp ? k::omp::nrm2(x) : k::serial::nrm2(x));
}

template <bool Omp>
void BM_axpy(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = random_vector(n, 4);
  auto y = random_vector(n, 5);
  for (auto _ : st) {
    Omp ? k::omp::axpy(1e-3, x, y) : k::serial::axpy(1e-3, x, y);
    benchmark::ClobberMemory();
  }
}

// projection onto a 16-column block followed by reconstruction, the shape of
// one classical Gram-Schmidt pass in the Arnoldi loop
template <bool Omp>
void BM_gram_schmidt(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  constexpr std::size_t m = 16;
  const auto cols = random_vector(n * m, 6);
  const auto x = random_vector(n, 7);
  std::vector<double> c(m), y(n);
  for (auto _ : st) {
    if constexpr (Omp) {
      k::omp::gemv_t_cols(cols, n, x, c);
      k::omp::gemv_cols(cols, n, c, y);
    } else {
      k::serial::gemv_t_cols(cols, n, x, c);
      k::serial::gemv_cols(cols, n, c, y);
    }
    benchmark::ClobberMemory();
  }
}

template <bool Omp>
void BM_allen_cahn_rhs(benchmark::State& st) {
  const auto side = static_cast<std::size_t>(st.range(0));
  const k::AllenCahnGrid g{side, side, 1.0, 1.0};
  const auto u = random_vector(side * side, 8);
  std::vector<double> out(side * side);
  for (auto _ : st) {
    Omp ? k::omp::allen_cahn_rhs(g, u, out) : k::serial::allen_cahn_rhs(g, u, out);
    benchmark::ClobberMemory();
  }
}

template <bool Omp>
void BM_allen_cahn_jvp(benchmark::State& st) {
  const auto side = static_cast<std::size_t>(st.range(0));
  const k::AllenCahnGrid g{side, side, 1.0, 1.0};
  const auto u = random_vector(side * side, 9), v = random_vector(side * side, 10);
  std::vector<double> out(side * side);
  for (auto _ : st) {
    Omp ? k::omp::allen_cahn_jvp(g, u, v, out) : k::serial::allen_cahn_jvp(g, u, v, out);
    benchmark::ClobberMemory();
  }
}

}  // namespace

#define ROK_BENCH_PAIR(fn, ...)                                  \
  BENCHMARK_TEMPLATE(fn, false)->Name(#fn "/serial")->__VA_ARGS__; \
  BENCHMARK_TEMPLATE(fn, true)->Name(#fn "/omp")->__VA_ARGS__

ROK_BENCH_PAIR(BM_dot, RangeMultiplier(8)->Range(1 << 12, 1 << 21));
ROK_BENCH_PAIR(BM_nrm2, RangeMultiplier(8)->Range(1 << 12, 1 << 21));
ROK_BENCH_PAIR(BM_axpy, RangeMultiplier(8)->Range(1 << 12, 1 << 21));
ROK_BENCH_PAIR(BM_gram_schmidt, RangeMultiplier(4)->Range(1 << 12, 1 << 18));
ROK_BENCH_PAIR(BM_allen_cahn_rhs, RangeMultiplier(2)->Range(64, 1024));
ROK_BENCH_PAIR(BM_allen_cahn_jvp, RangeMultiplier(2)->Range(64, 1024));

BENCHMARK_MAIN();
