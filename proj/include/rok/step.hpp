#pragma once

#include <cstdint>
#include <vector>

#include "rok/arnoldi.hpp"
#include "rok/linalg.hpp"
#include "rok/problems.hpp"
#include "rok/tableau.hpp"

namespace rok {

struct StepStats {
  std::size_t basis_size = 0;  // final dimension, core + extensions
  std::size_t core_size = 0;
  std::size_t extensions = 0;
  std::int64_t rhs_evals = 0;  // spent inside the step (stages 2..s, extension JVPs)
  std::int64_t jvp_evals = 0;
  double first_stage_residual = 0.0;
  bool refactored = false;  // an LU append fell back to a full factorization
};

/// Stage quantities retained for the residual diagnostics.
struct StepInternals {
  double h = 0.0;
  bool extended = false;
  std::vector<Vector> F;       // stage right-hand sides
  std::vector<Vector> psi;     // V_i^T F_i, length stage_dim[i]
  std::vector<Vector> lambda;  // reduced stage solutions, length stage_dim[i]
  std::vector<Vector> k;       // full-space stage increments
  std::vector<std::size_t> stage_dim;
  KrylovBasis basis;  // basis after the last stage
  Vector y;
};

struct StepResult {
  Vector y_new;
  Vector y_embedded;
  StepStats stats;
  StepInternals internals;
};

/// One step of the K-type Rosenbrock-Krylov method with phi(z) = 1/(1-z).
///
/// `fy` must equal f(y) and `basis` must have been built from it. Stage i:
///   F_i = f(y + sum_{j<i} alpha_ij k_j),  psi_i = V^T F_i,
///   (I - h gamma H) lambda_i = h psi_i + h H sum_{j<i} gamma_ij lambda_j,
///   k_i = V lambda_i + h (F_i - V psi_i).
/// With `extend`, F_i (i >= 2) is appended to the basis before psi_i is
/// formed; the LU factor is bordered and earlier lambda_j are zero-padded.
StepResult rok_step(const OdeProblem& problem, const Vector& y, const Vector& fy, double h,
                    const Tableau& tableau, KrylovBasis basis, bool extend,
                    WorkCount* work = nullptr);

/// sum_{j<=i} gamma_ij lambda_j with gamma_ii = gamma, each lambda_j
/// zero-padded to length `dim`.
Vector combined_lambda(const Tableau& tableau, const StepInternals& in, std::size_t i,
                       std::size_t dim);

/// Stage residual of an unextended step:
///   r_i = -h^2 J sum_{j<=i} gamma_ij (F_j - V psi_j)
///         - h h_{M+1,M} v_{M+1} e_M^T sum_{j<=i} gamma_ij lambda_j
Vector stage_residual_formula(const OdeProblem& problem, const Tableau& tableau,
                              const StepInternals& in, std::size_t i, WorkCount* work = nullptr);

/// Stage residual of an extended step, with V_i the basis in use at stage i
/// and lam = sum_{j<=i} gamma_ij lambda_j (zero-padded):
///   r_i = -h h_{M+1,M} v_{M+1} e_M^T lam
///         - h (I - V_i V_i^T) sum_k (J vbar_k) e_{M+k}^T lam
Vector stage_residual_formula_extended(const Tableau& tableau, const StepInternals& in,
                                       std::size_t i);

/// r_i = k_i - h F_i - h J sum_{j<=i} gamma_ij k_j (one JVP).
Vector direct_stage_residual(const OdeProblem& problem, const Tableau& tableau,
                             const StepInternals& in, std::size_t i, WorkCount* work = nullptr);

}  // namespace rok
