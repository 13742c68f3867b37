#pragma once

#include <complex>
#include <vector>

#include "rok/arnoldi.hpp"
#include "rok/linalg.hpp"
#include "rok/tableau.hpp"

namespace rok {

/// Linear stability of the method on y' = J y when the stage systems use an
/// approximation A of J:
///   K = [I - alpha (x) hJ - gamma (x) hA]^{-1} (1 (x) hJ) y,
///   y_new = y + (b^T (x) I) K = Rt(hJ, hA) y = R(hJ) y + S(hJ, hA) y.
/// Block matrices are assembled densely; N * s is limited to kMaxBlockDim.
inline constexpr std::size_t kMaxBlockDim = 2000;

/// R(z) = 1 + z b^T (I - z beta)^{-1} 1 of the underlying Rosenbrock method.
std::complex<double> stability_function(const Tableau& tableau, std::complex<double> z);

/// Rt(hJ, hA) from the block system.
DenseMatrix transfer_matrix_analytic(const DenseMatrix& J, const DenseMatrix& A,
                                     const Tableau& tableau, double h);

/// R(hJ), i.e. transfer_matrix_analytic with A = J.
DenseMatrix classical_transfer_matrix(const DenseMatrix& J, const Tableau& tableau, double h);

/// Columns Rt e_j from the stage recursion with a dense A:
///   k_i = (I - h gamma A)^{-1} (h J (y + sum alpha_ij k_j) + h A sum_{j<i} gamma_ij k_j).
DenseMatrix transfer_matrix_empirical(const DenseMatrix& J, const DenseMatrix& A,
                                      const Tableau& tableau, double h);

/// Columns Rt e_j from rok_step on y' = J y with the given (fixed) basis, so
/// A = V H V^T.
DenseMatrix transfer_matrix_empirical(const DenseMatrix& J, const KrylovBasis& basis,
                                      const Tableau& tableau, double h);

/// V H V^T
DenseMatrix krylov_approximation(const KrylovBasis& basis);

/// S(hJ, hA) y = -(b^T (x) I) [I - beta (x) hJ]^{-1} [gamma (x) (hJ - hA)]
///               [I - gamma (x) hA]^{-1} (h F)
/// with F the stage right-hand sides J(y + sum alpha_ij k_j) of the stage
/// recursion. The K-method stage equations read K = [I - gamma (x) hA]^{-1} hF,
/// hence the factor h on F.
Vector stage_stability_term(const DenseMatrix& J, const DenseMatrix& A, const Tableau& tableau,
                            double h, const Vector& y);

/// S y = (b^T (x) I) ([I - alpha (x) hJ - gamma (x) hA]^{-1} - [I - beta (x) hJ]^{-1})
///       (1 (x) hJ) y
Vector stage_stability_term_resolvent(const DenseMatrix& J, const DenseMatrix& A,
                                      const Tableau& tableau, double h, const Vector& y);

/// max|lhs - rhs| / (max|W^{-1}| + max|B^{-1}|) for
///   W^{-1} - B^{-1} = -B^{-1} [gamma (x) (hJ - hA)] W^{-1},
/// W = I - alpha (x) hJ - gamma (x) hA,  B = I - beta (x) hJ.
double check_block_identity(const DenseMatrix& J, const DenseMatrix& A, const Tableau& tableau,
                            double h);

/// Per-stage approximations A_1..A_s (basis extension). Returns the
/// supervector [I - beta (x) hJ]^{-1} [gamma (x) hJ - h At] [I - h At]^{-1} F
/// with At = [gamma_ij A_j]. Diagnostic only.
Vector per_stage_stability_supervector(const DenseMatrix& J, const std::vector<DenseMatrix>& A,
                                       const Tableau& tableau, double h, const Vector& F);

/// Deviation of the diagonal-block decomposition for one stage:
///   (I - h g J)^{-1} h g (J - A_i) (I - h g A_i)^{-1} F_i
///     = (I - h g J)^{-1} F_i - (I - h g A_i)^{-1} F_i.
double per_stage_diagonal_identity(const DenseMatrix& J, const DenseMatrix& Ai, double gamma,
                                   double h, const Vector& Fi);

struct StabilityReport {
  double rho_classic = 0.0;    // rho(R(hJ))
  double rho_effective = 0.0;  // rho(Rt(hJ, hA)); inf when I - h gamma A is singular
  double h = 0.0;
  std::size_t basis_size = 0;
  bool converged = true;  // both eigenvalue iterations converged
};

StabilityReport stability_report(const DenseMatrix& J, const DenseMatrix& A,
                                 const Tableau& tableau, double h, std::size_t basis_size);

/// n log-spaced values from h_lo to h_hi inclusive.
std::vector<double> log_grid(double h_lo, double h_hi, std::size_t n);

/// Largest h among the reports with rho_effective <= 1 + 1e-12, or 0.
double largest_stable_h(const std::vector<StabilityReport>& reports);

}  // namespace rok
