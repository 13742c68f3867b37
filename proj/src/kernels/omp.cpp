#include <array>
#include <cassert>
#include <cmath>

#ifdef ROK_HAVE_OPENMP
#include <omp.h>
#endif

#include "chunking.hpp"
#include "rok/kernels.hpp"

namespace rok::kernels {

bool openmp_enabled() {
#ifdef ROK_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef ROK_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  std::array<double, kReductionChunks> partial{};
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < kReductionChunks; ++c)
    partial[c] = detail::dot_range(x.data(), y.data(), detail::chunk(n, c));
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double nrm2(std::span<const double> x) {
  const std::size_t n = x.size();
  std::array<double, kReductionChunks> scales{};
  std::array<double, kReductionChunks> ssqs{};
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < kReductionChunks; ++c) {
    double s = 0.0, q = 1.0;
    detail::ssq_range(x.data(), detail::chunk(n, c), s, q);
    scales[c] = s;
    ssqs[c] = q;
  }
  double scale = 0.0, ssq = 1.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c) detail::ssq_merge(scale, ssq, scales[c], ssqs[c]);
  return scale * std::sqrt(ssq);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, std::span<double> x) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void gemv_cols(std::span<const double> cols, std::size_t n, std::span<const double> c,
               std::span<double> y) {
  assert(y.size() == n && cols.size() >= n * c.size());
  const std::size_t m = c.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += cols[j * n + i] * c[j];
    y[i] = s;
  }
}

void gemv_t_cols(std::span<const double> cols, std::size_t n, std::span<const double> x,
                 std::span<double> c) {
  assert(x.size() == n && cols.size() >= n * c.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = dot(cols.subspan(j * n, n), x);
}

void allen_cahn_rhs(const AllenCahnGrid& g, std::span<const double> u, std::span<double> out) {
  assert(u.size() == g.nx * g.ny && out.size() == u.size());
  const std::size_t nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * j;
      const double uk = u[k];
      out[k] = g.alpha * detail::laplacian_at(g, u.data(), i, j) + g.gamma_rc * (uk - uk * uk * uk);
    }
}

void allen_cahn_jvp(const AllenCahnGrid& g, std::span<const double> u, std::span<const double> v,
                    std::span<double> out) {
  assert(u.size() == g.nx * g.ny && v.size() == u.size() && out.size() == u.size());
  const std::size_t nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * j;
      out[k] = g.alpha * detail::laplacian_at(g, v.data(), i, j) +
               g.gamma_rc * (1.0 - 3.0 * u[k] * u[k]) * v[k];
    }
}

}  // namespace omp
}  // namespace rok::kernels
