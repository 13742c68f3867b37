#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <string>
#include <vector>

#include "rok/arnoldi.hpp"
#include "rok/problems.hpp"
#include "rok/step.hpp"
#include "rok/tableau.hpp"

namespace rok {

/// Classical Rosenbrock step with the exact Jacobian and direct solves of
/// (I - h gamma J) k_i = h F_i + h J sum_{j<i} gamma_ij k_j. Uses a sparse LU
/// when the problem registers a sparse Jacobian, a dense LU otherwise.
///
/// This is the full-space (M = N) limit of rok_step without building an
/// N-dimensional Krylov basis.
class FullSpaceStepper {
 public:
  FullSpaceStepper(const OdeProblem& problem, const Tableau& tableau);

  /// Re-evaluate the Jacobian at y. Factorizations are cached per h until the
  /// next call.
  void set_state(const Vector& y, WorkCount* work = nullptr);

  /// Returns {y_new, y_embedded}. Requires set_state(y) beforehand.
  std::pair<Vector, Vector> step(const Vector& y, const Vector& fy, double h,
                                 WorkCount* work = nullptr);

 private:
  struct Impl;
  const OdeProblem& problem_;
  const Tableau& tableau_;
  std::shared_ptr<Impl> impl_;
};

enum class BasisStrategy {
  Fixed,                     // build_fixed with fixed_M
  AdaptiveResidual,          // build_adaptive with resid_tol
  AdaptiveResidualMatchTol,  // build_adaptive with resid_tol = rtol
  FullSpace,                 // FullSpaceStepper (reference mode)
};

std::string to_string(BasisStrategy s);
/// Accepts "fixed", "adaptive", "adaptive-match-tol", "full-space".
BasisStrategy parse_basis_strategy(const std::string& text);

struct IntegratorConfig {
  double rtol = 1e-6;
  double atol = 1e-6;
  BasisStrategy strategy = BasisStrategy::Fixed;
  std::size_t fixed_M = 4;
  double resid_tol = 1e-6;
  bool extend = false;
  double h_init = 1e-4;
  double h_min = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  double fac_min = 0.2;
  double fac_max = 5.0;
  std::size_t M_max = 48;
  std::vector<std::size_t> test_indices = default_test_indices();
  std::int64_t max_steps = 1'000'000;
  bool record_trace = false;
  ArnoldiOptions arnoldi;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

struct StepTrace {
  double t = 0.0;
  double h = 0.0;
  double err = 0.0;
  bool accepted = false;
  std::size_t basis_size = 0;
  std::size_t extensions = 0;
  double first_stage_residual = 0.0;
};

struct RunStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;  // error test failures
  std::int64_t failed = 0;    // steps abandoned on NonFiniteValue / SingularMatrix
  std::int64_t trivial = 0;   // equilibrium steps, f(y) = 0
  std::int64_t rhs_evals = 0;
  std::int64_t jvp_evals = 0;
  std::int64_t extensions = 0;
  std::int64_t adaptive_hit_max = 0;  // adaptive builds that ended at M_max
  double mean_basis = 0.0;            // mean core Krylov size over attempted steps
  double h_last = 0.0;
};

struct Solution {
  double t = 0.0;
  Vector y;
  RunStats stats;
  std::vector<StepTrace> trace;
};

/// RMS of (y_new - y_emb) / (atol + rtol |y_new|).
double error_norm(const Vector& y_new, const Vector& y_embedded, double rtol, double atol);

/// Adaptive integration of y' = f(y) from t0 to tF. Throws StepSizeUnderflow
/// when h drops below h_min or max_steps is exhausted. `stats_out`, when
/// given, receives the counters also on failure.
Solution integrate(const OdeProblem& problem, double t0, double tF, const Vector& y0,
                   const Tableau& tableau, const IntegratorConfig& config,
                   RunStats* stats_out = nullptr);

}  // namespace rok
