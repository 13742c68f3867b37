#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <thread>

#include "rok/app/commands.hpp"
#include "rok/app/csv.hpp"
#include "rok/app/reference_file.hpp"
#include "rok/errors.hpp"

namespace rok::app {

const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h = {
      "problem",   "strategy",   "tol",        "error",        "accepted",  "rejected",
      "rhs_evals", "jvp_evals",  "mean_basis", "extensions",   "wall_seconds", "converged"};
  return h;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  CsvWriter w(out);
  w.header(sweep_header());
  for (const auto& r : records) {
    w.field(r.problem).field(r.strategy).field(r.tol).field(r.error);
    w.field(static_cast<long long>(r.accepted)).field(static_cast<long long>(r.rejected));
    w.field(static_cast<long long>(r.rhs_evals)).field(static_cast<long long>(r.jvp_evals));
    w.field(r.mean_basis).field(static_cast<long long>(r.extensions)).field(r.wall_seconds);
    w.field(r.converged);
    w.end_row();
  }
}

Tableau load_tableau(const RunConfig& config) {
  return config.tableau.empty() ? Tableau::load_default() : Tableau::load(config.tableau);
}

ProblemInstance make_problem(const RunConfig& config) {
  return ProblemRegistry::with_builtins().make(config.problem, config.effective_problem_params());
}

double relative_error(const Vector& a, const Vector& b) {
  const double nb = b.norm();
  const double d = (a - b).norm();
  return nb > 0.0 ? d / nb : d;
}

double mixed_difference(const Vector& a, const Vector& b) {
  if (b.size() == 0) return 0.0;
  const Vector w = (a - b).array() / (1.0 + b.array().abs());
  return w.norm() / std::sqrt(static_cast<double>(b.size()));
}

Vector rk4_fixed(const OdeProblem& problem, const Vector& y0, double t0, double tF, std::int64_t n) {
  const double h = (tF - t0) / static_cast<double>(n);
  Vector y = y0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Vector k1 = problem.rhs(y);
    const Vector k2 = problem.rhs(y + 0.5 * h * k1);
    const Vector k3 = problem.rhs(y + 0.5 * h * k2);
    const Vector k4 = problem.rhs(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

double estimate_spectral_radius(const OdeProblem& problem, const Vector& y, std::uint64_t seed,
                                int iterations) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(y.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();
  double rho = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = problem.jvp(y, v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    rho = std::max(rho, nw);
    v = w / nw;
  }
  return rho;
}

ReferenceResult compute_reference(const ProblemInstance& inst, const Tableau& tableau,
                                  const IntegratorConfig& base, const ReferenceSettings& settings,
                                  std::uint64_t seed) {
  IntegratorConfig cfg = base;
  cfg.strategy = BasisStrategy::FullSpace;
  cfg.extend = false;
  cfg.rtol = cfg.atol = settings.tol;
  cfg.h_min = std::min(cfg.h_min, 1e-16);
  cfg.h_init = std::min(cfg.h_init, 1e-6 * (inst.t_final - inst.t0));
  cfg.h_init = std::max(cfg.h_init, cfg.h_min);
  cfg.record_trace = false;

  ReferenceResult res;
  Solution sol = integrate(inst.problem, inst.t0, inst.t_final, inst.y0, tableau, cfg);
  res.y = sol.y;
  res.stats = sol.stats;
  if (!settings.cross_check) return res;

  // explicit oracle, started inside the RK4 stability interval
  const double span = inst.t_final - inst.t0;
  const double rho = 1.5 * estimate_spectral_radius(inst.problem, inst.y0, seed);
  const double h0 = rho > 0.0 ? std::min(span / 16.0, 2.5 / rho) : span / 16.0;
  auto n = static_cast<std::int64_t>(std::ceil(span / h0));
  Vector prev = rk4_fixed(inst.problem, inst.y0, inst.t0, inst.t_final, n);
  while (true) {
    if (2 * n > settings.max_oracle_steps)
      throw Error("reference cross-check: step-halving oracle did not settle within " +
                  std::to_string(settings.max_oracle_steps) + " steps");
    n *= 2;
    Vector cur = rk4_fixed(inst.problem, inst.y0, inst.t0, inst.t_final, n);
    const bool settled = prev.allFinite() && mixed_difference(cur, prev) <= settings.agreement_tol;
    prev = std::move(cur);
    if (settled) break;
  }
  res.cross_checked = true;
  res.oracle_steps = n;
  res.oracle_difference = mixed_difference(res.y, prev);
  if (!(res.oracle_difference <= settings.cross_check_tol))
    throw Error("reference cross-check failed: full-space and RK4 solutions differ by " +
                format_double(res.oracle_difference) + " (mixed)");
  return res;
}

std::vector<SweepRecord> run_sweep(const RunConfig& config, const Tableau& tableau,
                                   const Vector& reference, std::size_t workers, bool timing) {
  struct Cell {
    const StrategySpec* strategy;
    double tol;
  };
  std::vector<Cell> cells;
  for (const auto& s : config.sweep.strategies)
    for (double tol : config.sweep.tolerances) cells.push_back({&s, tol});

  std::vector<SweepRecord> records(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      const Cell& cell = cells[idx];
      const ProblemInstance inst = make_problem(config);
      IntegratorConfig cfg = config.integrator;
      cell.strategy->apply(cfg);
      cfg.rtol = cell.tol;
      cfg.atol = cell.tol * config.sweep.atol_scale;
      cfg.record_trace = false;

      SweepRecord& rec = records[idx];
      rec.problem = config.problem;
      rec.strategy = cell.strategy->label;
      rec.tol = cell.tol;
      RunStats stats;
      const auto start = std::chrono::steady_clock::now();
      try {
        const Solution sol = integrate(inst.problem, inst.t0, inst.t_final, inst.y0, tableau, cfg, &stats);
        rec.converged = sol.y.allFinite();
        if (rec.converged) rec.error = relative_error(sol.y, reference);
      } catch (const rok::Error&) {
        rec.converged = false;
      }
      if (timing)
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.accepted = stats.accepted;
      rec.rejected = stats.rejected;
      rec.rhs_evals = stats.rhs_evals;
      rec.jvp_evals = stats.jvp_evals;
      rec.mean_basis = stats.mean_basis;
      rec.extensions = stats.extensions;
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, cells.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

std::vector<StabilityReport> stability_sweep(const ProblemInstance& inst, const Tableau& tableau,
                                             const StabilitySettings& settings) {
  const DenseMatrix J = inst.problem.dense_jacobian(inst.y0);
  const Vector f = inst.problem.rhs(inst.y0);
  const auto grid = log_grid(settings.h_lo, settings.h_hi, settings.points);
  const std::size_t n = inst.problem.dim();

  std::vector<StabilityReport> out;
  for (std::size_t m : settings.basis_sizes) {
    if (m >= n) continue;  // covered by the A = J block
    const KrylovBasis basis = build_fixed(inst.problem, inst.y0, f, m);
    const DenseMatrix A = krylov_approximation(basis);
    for (double h : grid) out.push_back(stability_report(J, A, tableau, h, basis.size()));
  }
  if (settings.include_full)
    for (double h : grid) out.push_back(stability_report(J, J, tableau, h, n));
  return out;
}

namespace {

void print_stats(std::ostream& out, const RunStats& s) {
  out << "accepted " << s.accepted << "\n"
      << "rejected " << s.rejected << "\n"
      << "failed " << s.failed << "\n"
      << "rhs_evals " << s.rhs_evals << "\n"
      << "jvp_evals " << s.jvp_evals << "\n"
      << "mean_basis " << format_double(s.mean_basis) << "\n"
      << "extensions " << s.extensions << "\n";
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

std::map<std::string, std::string> reference_metadata(const RunConfig& config, double tol) {
  std::map<std::string, std::string> md;
  md["problem"] = config.problem;
  const ProblemParams params = config.effective_problem_params();
  for (const auto& [k, v] : params.values()) md["param." + k] = v;
  md["rtol"] = format_double(tol);
  md["atol"] = format_double(tol);
  return md;
}

Vector reference_for(const RunConfig& config, const ProblemInstance& inst, const Tableau& tableau,
                     const std::string& path, std::ostream& err) {
  if (!path.empty()) {
    ReferenceState ref = read_reference(path);
    if (static_cast<std::size_t>(ref.y.size()) != inst.problem.dim())
      throw ConfigError("reference '" + path + "' has dimension " + std::to_string(ref.y.size()) +
                        ", problem has " + std::to_string(inst.problem.dim()));
    if (auto it = ref.metadata.find("problem"); it != ref.metadata.end() && it->second != config.problem)
      throw ConfigError("reference '" + path + "' was computed for problem '" + it->second + "'");
    return ref.y;
  }
  err << "computing reference solution\n";
  return compute_reference(inst, tableau, config.integrator, config.reference, config.seed).y;
}

}  // namespace

int cmd_run(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const Tableau tableau = load_tableau(config);
  const ProblemInstance inst = make_problem(config);
  RunStats stats;
  Solution sol;
  try {
    sol = integrate(inst.problem, inst.t0, inst.t_final, inst.y0, tableau, config.integrator, &stats);
  } catch (const StepSizeUnderflow& e) {
    err << "integration failed at t = " << format_double(e.t()) << " (h = " << format_double(e.h())
        << "): " << e.what() << "\n";
    out << "problem " << config.problem << "\n"
        << "converged false\n";
    print_stats(out, stats);
    return 2;
  }
  out << "problem " << config.problem << "\n"
      << "strategy " << to_string(config.integrator.strategy) << (config.integrator.extend ? "+ext" : "")
      << "\n"
      << "converged true\n"
      << "t_final " << format_double(sol.t) << "\n"
      << "norm " << format_double(sol.y.norm()) << "\n";
  print_stats(out, sol.stats);
  if (inst.exact) out << "error_exact " << format_double(relative_error(sol.y, inst.exact(sol.t))) << "\n";
  if (!config.reference_file.empty()) {
    const Vector ref = reference_for(config, inst, tableau, config.reference_file, err);
    out << "error_reference " << format_double(relative_error(sol.y, ref)) << "\n";
  }
  if (config.integrator.record_trace) {
    CsvWriter w(out);
    w.header({"t", "h", "err", "accepted", "basis", "extensions", "first_stage_residual"});
    for (const auto& s : sol.trace) {
      w.field(s.t).field(s.h).field(s.err).field(s.accepted).field(s.basis_size).field(s.extensions);
      w.field(s.first_stage_residual);
      w.end_row();
    }
  }
  if (!opts.out.empty()) {
    write_reference(opts.out, {sol.y, reference_metadata(config, config.integrator.rtol)});
  }
  return 0;
}

int cmd_sweep(const RunConfig& config, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const Tableau tableau = load_tableau(config);
  const ProblemInstance inst = make_problem(config);
  const Vector ref = reference_for(config, inst, tableau, config.sweep.reference, err);
  const std::size_t workers = opts.workers.value_or(config.sweep.workers);
  const bool timing = opts.timing || config.sweep.record_timing;
  const auto records = run_sweep(config, tableau, ref, workers, timing);
  if (opts.out.empty()) {
    write_sweep_csv(out, records);
  } else {
    auto f = open_out(opts.out);
    write_sweep_csv(f, records);
    std::size_t ok = 0;
    for (const auto& r : records) ok += r.converged ? 1 : 0;
    out << "wrote " << records.size() << " records (" << ok << " converged) to " << opts.out.string() << "\n";
  }
  return 0;
}

int cmd_reference(const RunConfig& config, const CommandOptions& opts, std::ostream& out,
                  std::ostream& err) {
  const Tableau tableau = load_tableau(config);
  const ProblemInstance inst = make_problem(config);
  ReferenceResult res;
  try {
    res = compute_reference(inst, tableau, config.integrator, config.reference, config.seed);
  } catch (const rok::Error& e) {
    err << "reference failed: " << e.what() << "\n";
    return 2;
  }
  out << "problem " << config.problem << "\n"
      << "dimension " << res.y.size() << "\n"
      << "accepted " << res.stats.accepted << "\n"
      << "rejected " << res.stats.rejected << "\n";
  if (res.cross_checked)
    out << "oracle_steps " << res.oracle_steps << "\n"
        << "oracle_difference " << format_double(res.oracle_difference) << "\n";
  if (inst.exact) out << "error_exact " << format_double(relative_error(res.y, inst.exact(inst.t_final))) << "\n";
  if (!opts.out.empty()) {
    auto md = reference_metadata(config, config.reference.tol);
    md["t_final"] = format_double(inst.t_final);
    md["accepted"] = std::to_string(res.stats.accepted);
    if (res.cross_checked) md["oracle_difference"] = format_double(res.oracle_difference);
    write_reference(opts.out, {res.y, md});
    out << "wrote " << opts.out.string() << "\n";
  }
  return 0;
}

int cmd_stability(const RunConfig& config, const CommandOptions& opts, std::ostream& out,
                  std::ostream&) {
  const Tableau tableau = load_tableau(config);
  const ProblemInstance inst = make_problem(config);
  const auto reports = stability_sweep(inst, tableau, config.stability);

  auto emit = [&](std::ostream& os) {
    CsvWriter w(os);
    w.header({"h", "rho_classic", "rho_effective", "M"});
    for (const auto& r : reports) {
      w.field(r.h).field(r.rho_classic).field(r.rho_effective).field(r.basis_size);
      w.end_row();
    }
  };
  if (opts.out.empty()) {
    emit(out);
  } else {
    auto f = open_out(opts.out);
    emit(f);
    // largest stable step per basis size
    std::map<std::size_t, std::vector<StabilityReport>> by_m;
    for (const auto& r : reports) by_m[r.basis_size].push_back(r);
    for (const auto& [m, rs] : by_m)
      out << "M=" << m << " largest stable h " << format_double(largest_stable_h(rs)) << "\n";
  }
  return 0;
}

int cmd_defaults(std::ostream& out) {
  out << default_config_text();
  return 0;
}

}  // namespace rok::app
