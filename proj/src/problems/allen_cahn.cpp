#include <cmath>
#include <vector>

#include "rok/errors.hpp"
#include "rok/problems.hpp"

namespace rok {

kernels::AllenCahnGrid allen_cahn_grid(const AllenCahnSpec& spec) {
  return {spec.nx, spec.ny, spec.alpha, spec.gamma_rc};
}

ProblemInstance make_allen_cahn(const AllenCahnSpec& spec) {
  if (spec.nx < 3 || spec.ny < 3) throw ConfigError("allen-cahn: nx and ny must be at least 3");
  if (!(spec.alpha > 0.0)) throw ConfigError("allen-cahn: alpha must be positive");

  const kernels::AllenCahnGrid grid = allen_cahn_grid(spec);
  const std::size_t n = spec.nx * spec.ny;

  OdeProblem p(
      "allen-cahn", n,
      [grid](const Vector& u, Vector& out) { kernels::allen_cahn_rhs(grid, as_span(u), as_span(out)); },
      [grid](const Vector& u, const Vector& v, Vector& out) {
        kernels::allen_cahn_jvp(grid, as_span(u), as_span(v), as_span(out));
      });

  p.with_sparse_jacobian([grid](const Vector& u) {
    const auto nx = static_cast<Eigen::Index>(grid.nx);
    const auto ny = static_cast<Eigen::Index>(grid.ny);
    const double ix2 = grid.alpha * static_cast<double>(nx * nx);
    const double iy2 = grid.alpha * static_cast<double>(ny * ny);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(5 * nx * ny));
    for (Eigen::Index j = 0; j < ny; ++j)
      for (Eigen::Index i = 0; i < nx; ++i) {
        const Eigen::Index k = i + nx * j;
        double diag = grid.gamma_rc * (1.0 - 3.0 * u(k) * u(k));
        // mirror ghosts fold back onto the centre cell
        if (i > 0) { t.emplace_back(k, k - 1, ix2); diag -= ix2; }
        if (i + 1 < nx) { t.emplace_back(k, k + 1, ix2); diag -= ix2; }
        if (j > 0) { t.emplace_back(k, k - nx, iy2); diag -= iy2; }
        if (j + 1 < ny) { t.emplace_back(k, k + nx, iy2); diag -= iy2; }
        t.emplace_back(k, k, diag);
      }
    SparseMatrix J(nx * ny, nx * ny);
    J.setFromTriplets(t.begin(), t.end());
    return J;
  });

  Vector u0(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < spec.ny; ++j)
    for (std::size_t i = 0; i < spec.nx; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(spec.nx);
      const double y = (static_cast<double>(j) + 0.5) / static_cast<double>(spec.ny);
      u0(static_cast<Eigen::Index>(i + spec.nx * j)) =
          0.4 + 0.1 * (x + y) + 0.1 * std::sin(10.0 * x) * std::sin(20.0 * y);
    }

  return {std::move(p), std::move(u0), 0.0, 0.2, {}};
}

}  // namespace rok
