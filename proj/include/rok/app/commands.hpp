#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rok/app/config.hpp"
#include "rok/integrator.hpp"
#include "rok/stability.hpp"
#include "rok/tableau.hpp"

namespace rok::app {

/// One work-precision datum. `error` is empty unless the run converged.
struct SweepRecord {
  std::string problem;
  std::string strategy;
  double tol = 0.0;
  std::optional<double> error;  // relative L2 error against the reference
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t rhs_evals = 0;
  std::int64_t jvp_evals = 0;
  double mean_basis = 0.0;
  std::int64_t extensions = 0;
  std::optional<double> wall_seconds;
  bool converged = false;
};

/// Fixed CSV header of the sweep output.
const std::vector<std::string>& sweep_header();
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

Tableau load_tableau(const RunConfig& config);
ProblemInstance make_problem(const RunConfig& config);

/// ||a - b|| / ||b|| (absolute when b = 0).
double relative_error(const Vector& a, const Vector& b);

/// RMS of (a_i - b_i) / (1 + |b_i|): the error weight of a run with rtol = atol.
double mixed_difference(const Vector& a, const Vector& b);

/// Classical fourth-order Runge-Kutta with n equal steps.
Vector rk4_fixed(const OdeProblem& problem, const Vector& y0, double t0, double tF, std::int64_t n);

/// Dominant |eigenvalue| of J(y) by power iteration on jvp.
double estimate_spectral_radius(const OdeProblem& problem, const Vector& y, std::uint64_t seed,
                                int iterations = 100);

struct ReferenceResult {
  Vector y;
  RunStats stats;
  bool cross_checked = false;
  double oracle_difference = 0.0;  // mixed_difference, full-space vs explicit oracle
  std::int64_t oracle_steps = 0;
};

/// Full-space run at rtol = atol = settings.tol, optionally cross-validated
/// by step-halving RK4; both comparisons use mixed_difference. Throws
/// rok::Error when either part fails.
ReferenceResult compute_reference(const ProblemInstance& instance, const Tableau& tableau,
                                  const IntegratorConfig& base, const ReferenceSettings& settings,
                                  std::uint64_t seed);

/// Runs every (strategy, tol) cell; records come back in that order.
std::vector<SweepRecord> run_sweep(const RunConfig& config, const Tableau& tableau,
                                   const Vector& reference, std::size_t workers, bool timing);

/// Spectral radii on the configured h grid for each basis size (Krylov
/// basis of f(y0)); with include_full, a block with A = J labelled M = N.
std::vector<StabilityReport> stability_sweep(const ProblemInstance& instance,
                                             const Tableau& tableau,
                                             const StabilitySettings& settings);

struct CommandOptions {
  std::filesystem::path out;
  std::optional<std::size_t> workers;
  bool timing = false;
};

int cmd_run(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_reference(const RunConfig& config, const CommandOptions& opts, std::ostream& out,
                  std::ostream& err);
int cmd_stability(const RunConfig& config, const CommandOptions& opts, std::ostream& out,
                  std::ostream& err);
int cmd_defaults(std::ostream& out);

}  // namespace rok::app
