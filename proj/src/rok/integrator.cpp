#include <algorithm>
#include <cmath>
#include <optional>

#include "rok/errors.hpp"
#include "rok/integrator.hpp"
#include "rok/kernels.hpp"

namespace rok {

std::string to_string(BasisStrategy s) {
  switch (s) {
    case BasisStrategy::Fixed: return "fixed";
    case BasisStrategy::AdaptiveResidual: return "adaptive";
    case BasisStrategy::AdaptiveResidualMatchTol: return "adaptive-match-tol";
    case BasisStrategy::FullSpace: return "full-space";
  }
  return "fixed";
}

BasisStrategy parse_basis_strategy(const std::string& text) {
  for (auto s : {BasisStrategy::Fixed, BasisStrategy::AdaptiveResidual,
                 BasisStrategy::AdaptiveResidualMatchTol, BasisStrategy::FullSpace})
    if (to_string(s) == text) return s;
  throw ConfigError("unknown basis strategy '" + text +
                    "' (expected fixed, adaptive, adaptive-match-tol or full-space)");
}

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("rtol and atol must be positive");
  if (!(h_min > 0.0) || !(h_min <= h_init) || !(h_init <= h_max))
    throw ConfigError("step sizes must satisfy 0 < h_min <= h_init <= h_max");
  if (!(safety > 0.0) || !(fac_min > 0.0) || !(fac_min <= 1.0) || !(fac_max >= 1.0))
    throw ConfigError("controller needs safety > 0, 0 < fac_min <= 1 <= fac_max");
  if (strategy == BasisStrategy::Fixed && fixed_M == 0) throw ConfigError("basis size M must be at least 1");
  if (strategy == BasisStrategy::AdaptiveResidual && !(resid_tol > 0.0))
    throw ConfigError("resid_tol must be positive");
  if (M_max == 0) throw ConfigError("M_max must be at least 1");
  if (max_steps <= 0) throw ConfigError("max_steps must be positive");
}

double error_norm(const Vector& y_new, const Vector& y_embedded, double rtol, double atol) {
  const auto n = y_new.size();
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = (y_new(i) - y_embedded(i)) / (atol + rtol * std::abs(y_new(i)));
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

namespace {

struct Attempt {
  Vector y_new;
  Vector y_emb;
  std::size_t basis_size = 0;
  std::size_t core_size = 0;
  std::size_t extensions = 0;
  double first_stage_residual = 0.0;
  bool trivial = false;
};

}  // namespace

Solution integrate(const OdeProblem& problem, double t0, double tF, const Vector& y0,
                   const Tableau& tableau, const IntegratorConfig& cfg, RunStats* stats_out) {
  cfg.validate();
  if (!(tF > t0)) throw ConfigError("integrate: t_final must exceed t0");
  if (static_cast<std::size_t>(y0.size()) != problem.dim())
    throw DimensionMismatch("integrate: y0 has the wrong dimension");
  if (!y0.allFinite()) throw NonFiniteValue("integrate: y0 is not finite");

  const int q = std::min(tableau.order, tableau.embedded_order);
  const double expo = -1.0 / (q + 1.0);

  WorkCount work;
  Solution sol;
  RunStats& st = sol.stats;
  double t = t0;
  Vector y = y0;
  Vector fy = problem.rhs(y, &work);
  double h = std::min(cfg.h_init, cfg.h_max);
  std::int64_t attempts = 0;
  double core_sum = 0.0;
  std::int64_t core_count = 0;

  std::optional<KrylovBasis> cached;  // Fixed strategy: valid while y is unchanged
  std::optional<FullSpaceStepper> full;
  bool full_fresh = false;
  if (cfg.strategy == BasisStrategy::FullSpace) full.emplace(problem, tableau);

  auto attempt_step = [&](double hh) {
    Attempt a;
    if (full) {
      if (!full_fresh) {
        full->set_state(y, &work);
        full_fresh = true;
      }
      auto [yn, ye] = full->step(y, fy, hh, &work);
      a.y_new = std::move(yn);
      a.y_emb = std::move(ye);
      a.basis_size = a.core_size = problem.dim();
      return a;
    }
    KrylovBasis basis;
    try {
      switch (cfg.strategy) {
        case BasisStrategy::Fixed:
          if (!cached) cached = build_fixed(problem, y, fy, cfg.fixed_M, &work, cfg.arnoldi);
          basis = *cached;
          break;
        case BasisStrategy::AdaptiveResidual:
        case BasisStrategy::AdaptiveResidualMatchTol: {
          const double tol =
              cfg.strategy == BasisStrategy::AdaptiveResidual ? cfg.resid_tol : cfg.rtol;
          AdaptiveBuild b = build_adaptive(problem, y, fy, hh, tableau.gamma, tol, cfg.M_max,
                                           cfg.test_indices, &work, cfg.arnoldi);
          if (b.hit_max) ++st.adaptive_hit_max;
          basis = std::move(b.basis);
          break;
        }
        case BasisStrategy::FullSpace:
          break;
      }
    } catch (const ZeroStartVector&) {
      // equilibrium of an autonomous system: every stage RHS vanishes
      a.y_new = a.y_emb = y;
      a.trivial = true;
      return a;
    }
    StepResult r = rok_step(problem, y, fy, hh, tableau, std::move(basis), cfg.extend, &work);
    a.y_new = std::move(r.y_new);
    a.y_emb = std::move(r.y_embedded);
    a.basis_size = r.stats.basis_size;
    a.core_size = r.stats.core_size;
    a.extensions = r.stats.extensions;
    a.first_stage_residual = r.stats.first_stage_residual;
    return a;
  };

  auto finish_stats = [&] {
    st.rhs_evals = work.rhs;
    st.jvp_evals = work.jvp;
    st.mean_basis = core_count ? core_sum / static_cast<double>(core_count) : 0.0;
    if (stats_out) *stats_out = st;
  };

  try {
    while (t < tF) {
      if (attempts >= cfg.max_steps)
        throw StepSizeUnderflow("step budget of " + std::to_string(cfg.max_steps) + " exhausted", t, h);
      ++attempts;

      bool last = false;
      double hh = h;
      if (t + hh >= tF || (tF - (t + hh)) <= 1e-14 * std::abs(tF)) {
        hh = tF - t;
        last = true;
      }

      Attempt a;
      try {
        a = attempt_step(hh);
      } catch (const NonFiniteValue&) {
        ++st.failed;
      } catch (const SingularMatrix&) {
        ++st.failed;
      }
      if (a.y_new.size() == 0) {  // failed attempt
        h = 0.5 * hh;
        if (h < cfg.h_min) throw StepSizeUnderflow("step size underflow after a failed step", t, h);
        continue;
      }

      if (!a.trivial) {
        core_sum += static_cast<double>(a.core_size);
        ++core_count;
      }
      const double err = error_norm(a.y_new, a.y_emb, cfg.rtol, cfg.atol);
      const bool accept = err <= 1.0;
      if (cfg.record_trace)
        sol.trace.push_back({t, hh, err, accept, a.basis_size, a.extensions, a.first_stage_residual});

      double fac = err == 0.0 ? cfg.fac_max : cfg.safety * std::pow(err, expo);
      fac = std::clamp(fac, cfg.fac_min, cfg.fac_max);

      if (accept) {
        ++st.accepted;
        if (a.trivial) ++st.trivial;
        st.extensions += static_cast<std::int64_t>(a.extensions);
        t = last ? tF : t + hh;
        y = std::move(a.y_new);
        st.h_last = hh;
        cached.reset();
        full_fresh = false;
        if (t < tF) fy = problem.rhs(y, &work);
        h = std::min(cfg.h_max, hh * fac);
      } else {
        ++st.rejected;
        h = hh * std::min(1.0, fac);
      }
      if (t < tF && h < cfg.h_min) throw StepSizeUnderflow("step size fell below h_min", t, h);
    }
  } catch (...) {
    finish_stats();
    throw;
  }

  finish_stats();
  sol.t = t;
  sol.y = std::move(y);
  return sol;
}

}  // namespace rok
