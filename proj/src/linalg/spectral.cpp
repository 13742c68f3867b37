#include <cmath>

#include <Eigen/Eigenvalues>

#include "rok/errors.hpp"
#include "rok/linalg.hpp"

namespace rok {

SpectralRadius spectral_radius(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("spectral_radius: matrix must be square");
  if (a.size() == 0) return {0.0, true};
  if (!a.allFinite()) throw NonFiniteValue("spectral_radius: non-finite entry");

  // EigenSolver reduces to Hessenberg form and runs Francis double-shift QR.
  Eigen::EigenSolver<DenseMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() == Eigen::Success) return {es.eigenvalues().cwiseAbs().maxCoeff(), true};

  // Fall back to the Gelfand estimate ||A^k||^(1/k).
  DenseMatrix p = a;
  double log_scale = 0.0;
  constexpr int kSquarings = 6;
  for (int i = 0; i < kSquarings; ++i) {
    const double s = p.norm();
    if (s == 0.0) return {0.0, false};
    p /= s;
    log_scale = 2.0 * (log_scale + std::log(s));
    p = p * p;
  }
  const double k = std::pow(2.0, kSquarings);
  return {std::exp((log_scale + std::log(p.norm())) / k), false};
}

}  // namespace rok
