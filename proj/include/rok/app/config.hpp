#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rok/integrator.hpp"
#include "rok/problems.hpp"

namespace rok::app {

/// One column of a sweep: a basis strategy plus the extension flag.
///   "M=<n>"     Fixed(n)
///   "R=<tol>"   AdaptiveResidual(tol)
///   "R=tol"     AdaptiveResidualMatchTol
///   "full"      FullSpace
/// with an optional "+ext" suffix.
struct StrategySpec {
  std::string label;
  BasisStrategy strategy = BasisStrategy::Fixed;
  std::size_t M = 4;
  double resid_tol = 0.0;
  bool extend = false;

  static StrategySpec parse(const std::string& label);
  void apply(IntegratorConfig& cfg) const;
};

struct SweepSettings {
  std::vector<double> tolerances;  // rtol values; atol = atol_scale * rtol
  double atol_scale = 1.0;
  std::vector<StrategySpec> strategies;
  std::string reference;  // reference file; computed on the fly when empty
  bool record_timing = false;
  std::size_t workers = 1;
};

struct ReferenceSettings {
  double tol = 1e-12;  // rtol = atol for the full-space run
  double cross_check_tol = 1e-9;
  double agreement_tol = 1e-11;  // step-halving convergence of the explicit oracle
  std::int64_t max_oracle_steps = 1 << 22;
  bool cross_check = true;
};

struct StabilitySettings {
  double h_lo = 1e-3;
  double h_hi = 10.0;
  std::size_t points = 25;
  std::vector<std::size_t> basis_sizes = {1, 2, 4};
  bool include_full = true;  // add a row set with M = N
};

/// Everything a CLI subcommand needs, read from a sectioned key = value file.
struct RunConfig {
  std::string problem = "dahlquist";
  ProblemParams problem_params;
  std::filesystem::path tableau;  // empty: the shipped default
  IntegratorConfig integrator;
  SweepSettings sweep;
  ReferenceSettings reference;
  StabilitySettings stability;
  std::uint64_t seed = 1;
  std::string reference_file;  // optional reference for `run`

  /// Problem parameters with the run seed filled in when absent.
  ProblemParams effective_problem_params() const;
};

RunConfig default_config();

/// Parse; ConfigError messages name the file, line and field.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>",
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// The default configuration in the file format, with comments.
std::string default_config_text();

}  // namespace rok::app
