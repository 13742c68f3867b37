#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rok {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;  // column-major

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double max_abs(const DenseMatrix& a);

/// LU factorization with partial pivoting of the reduced stage matrix
/// I - hg*H, where H is upper Hessenberg (or the bordered, extended form
/// produced by basis extension).
///
/// Rows whose entry in the pivot column is structurally zero are skipped, so
/// for a Hessenberg H only adjacent rows are ever swapped and the work is
/// O(M^2). Pivots below 1e-14 * max|I - hg*H| raise SingularMatrix.
class HessenbergLU {
 public:
  static constexpr double kPivotThreshold = 1e-14;

  HessenbergLU() = default;

  /// Factor P(I - hg*H) = LU.
  static HessenbergLU factor(const DenseMatrix& H, double hg);

  /// Solve (I - hg*H) x = rhs.
  Vector solve(const Vector& rhs) const;

  /// Grow the factored matrix by one row and column.
  ///
  /// `h_column` is the new column of H (length M+1, last entry is the new
  /// diagonal h_{M+1,M+1}); `h_row` holds the new row's entries of H left of
  /// the diagonal (length M, or empty for an all-zero row). The leading block
  /// keeps its permutation:
  ///   u = -hg L^{-1} P h_{1:M},  l^T = (-hg h_row)^T U^{-1},
  ///   u_{M+1,M+1} = 1 - hg h_{M+1,M+1} - l^T u.
  /// If the new pivot is below threshold the whole matrix is refactored from
  /// scratch. Returns true when the update was incremental.
  bool append(std::span<const double> h_column, std::span<const double> h_row = {});

  std::size_t size() const { return static_cast<std::size_t>(u_.rows()); }
  double hg() const { return hg_; }
  /// perm()[i] is the original row placed at position i.
  const std::vector<std::size_t>& perm() const { return perm_; }
  const DenseMatrix& lower() const { return l_; }
  const DenseMatrix& upper() const { return u_; }
  /// The matrix I - hg*H that was factored.
  const DenseMatrix& matrix() const { return a_; }
  /// Number of appends that fell back to a full refactorization.
  std::size_t refactorizations() const { return refactorizations_; }

  /// max|P(I - hg*H) - LU|
  double factorization_error() const;

 private:
  void factor_in_place();

  DenseMatrix a_;
  DenseMatrix l_;
  DenseMatrix u_;
  std::vector<std::size_t> perm_;
  double hg_ = 0.0;
  double scale_ = 1.0;
  std::size_t refactorizations_ = 0;
};

struct SpectralRadius {
  double value = 0.0;
  bool converged = true;  // false: QR iteration hit its cap, value is the best estimate
};

/// Largest eigenvalue modulus, via Hessenberg reduction and shifted QR.
SpectralRadius spectral_radius(const DenseMatrix& a);

}  // namespace rok
