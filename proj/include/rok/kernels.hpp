#pragma once

// Data-parallel inner loops used by the matrix-free integrator.
//
// Every kernel exists twice: `serial::` is the reference implementation the
// tests compare against, `omp::` is the OpenMP version. Reductions in the
// OpenMP path are split into a fixed number of chunks that is independent of
// the thread count and the partial sums are combined in chunk order, so
// results are bitwise reproducible for any OMP_NUM_THREADS.
//
// The unqualified functions in `rok::kernels` dispatch to `omp::` for long
// vectors and to `serial::` otherwise.

#include <cstddef>
#include <span>

namespace rok::kernels {

struct AllenCahnGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double alpha = 1.0;     // diffusion coefficient
  double gamma_rc = 1.0;  // reaction coefficient
};

namespace serial {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
// y = sum_j c[j] * cols[j], columns stored contiguously with leading dimension n
void gemv_cols(std::span<const double> cols, std::size_t n, std::span<const double> c,
               std::span<double> y);
// c[j] = <cols[j], x>
void gemv_t_cols(std::span<const double> cols, std::size_t n, std::span<const double> x,
                 std::span<double> c);
void allen_cahn_rhs(const AllenCahnGrid& g, std::span<const double> u, std::span<double> out);
void allen_cahn_jvp(const AllenCahnGrid& g, std::span<const double> u,
                    std::span<const double> v, std::span<double> out);
}  // namespace serial

namespace omp {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
void gemv_cols(std::span<const double> cols, std::size_t n, std::span<const double> c,
               std::span<double> y);
void gemv_t_cols(std::span<const double> cols, std::size_t n, std::span<const double> x,
                 std::span<double> c);
void allen_cahn_rhs(const AllenCahnGrid& g, std::span<const double> u, std::span<double> out);
void allen_cahn_jvp(const AllenCahnGrid& g, std::span<const double> u,
                    std::span<const double> v, std::span<double> out);
}  // namespace omp

// Vectors shorter than this stay on the serial path.
inline constexpr std::size_t kParallelThreshold = 8192;

// Number of partial sums used by the deterministic OpenMP reductions.
inline constexpr std::size_t kReductionChunks = 64;

bool openmp_enabled();
int max_threads();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return x.size() >= kParallelThreshold ? omp::dot(x, y) : serial::dot(x, y);
}
inline double nrm2(std::span<const double> x) {
  return x.size() >= kParallelThreshold ? omp::nrm2(x) : serial::nrm2(x);
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  x.size() >= kParallelThreshold ? omp::axpy(a, x, y) : serial::axpy(a, x, y);
}
inline void scal(double a, std::span<double> x) {
  x.size() >= kParallelThreshold ? omp::scal(a, x) : serial::scal(a, x);
}
inline void gemv_cols(std::span<const double> cols, std::size_t n, std::span<const double> c,
                      std::span<double> y) {
  n >= kParallelThreshold ? omp::gemv_cols(cols, n, c, y) : serial::gemv_cols(cols, n, c, y);
}
inline void gemv_t_cols(std::span<const double> cols, std::size_t n, std::span<const double> x,
                        std::span<double> c) {
  n >= kParallelThreshold ? omp::gemv_t_cols(cols, n, x, c) : serial::gemv_t_cols(cols, n, x, c);
}
inline void allen_cahn_rhs(const AllenCahnGrid& g, std::span<const double> u,
                           std::span<double> out) {
  u.size() >= kParallelThreshold ? omp::allen_cahn_rhs(g, u, out)
                                 : serial::allen_cahn_rhs(g, u, out);
}
inline void allen_cahn_jvp(const AllenCahnGrid& g, std::span<const double> u,
                           std::span<const double> v, std::span<double> out) {
  u.size() >= kParallelThreshold ? omp::allen_cahn_jvp(g, u, v, out)
                                 : serial::allen_cahn_jvp(g, u, v, out);
}

}  // namespace rok::kernels
