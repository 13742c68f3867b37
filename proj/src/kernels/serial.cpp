#include <cassert>
#include <cmath>

#include "chunking.hpp"
#include "rok/kernels.hpp"

namespace rok::kernels::serial {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c)
    total += detail::dot_range(x.data(), y.data(), detail::chunk(n, c));
  return total;
}

double nrm2(std::span<const double> x) {
  const std::size_t n = x.size();
  double scale = 0.0, ssq = 1.0;
  for (std::size_t c = 0; c < kReductionChunks; ++c) {
    double s = 0.0, q = 1.0;
    detail::ssq_range(x.data(), detail::chunk(n, c), s, q);
    detail::ssq_merge(scale, ssq, s, q);
  }
  return scale * std::sqrt(ssq);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scal(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

void gemv_cols(std::span<const double> cols, std::size_t n, std::span<const double> c,
               std::span<double> y) {
  assert(y.size() == n && cols.size() >= n * c.size());
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += cols[j * n + i] * c[j];
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
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = i + g.nx * j;
      const double uk = u[k];
      out[k] = g.alpha * detail::laplacian_at(g, u.data(), i, j) + g.gamma_rc * (uk - uk * uk * uk);
    }
}

void allen_cahn_jvp(const AllenCahnGrid& g, std::span<const double> u, std::span<const double> v,
                    std::span<double> out) {
  assert(u.size() == g.nx * g.ny && v.size() == u.size() && out.size() == u.size());
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = i + g.nx * j;
      out[k] = g.alpha * detail::laplacian_at(g, v.data(), i, j) +
               g.gamma_rc * (1.0 - 3.0 * u[k] * u[k]) * v[k];
    }
}

}  // namespace rok::kernels::serial
