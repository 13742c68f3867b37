#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rok/errors.hpp"
#include "rok/integrator.hpp"

using rok::BasisStrategy;
using rok::IntegratorConfig;
using rok::Tableau;
using rok::Vector;

namespace {

const Tableau& tab() {
  static const Tableau t = Tableau::load_default();
  return t;
}

}  // namespace

TEST_SUITE("integrator") {
TEST_CASE("Dahlquist at rtol 1e-8") {
  const auto d = rok::make_dahlquist(-1.0);
  IntegratorConfig c;
  c.rtol = c.atol = 1e-8;
  const auto s = rok::integrate(d.problem, 0.0, 1.0, d.y0, tab(), c);
  CHECK(s.t == 1.0);
  CHECK(std::abs(s.y(0) - std::exp(-1.0)) <= 1e-6);
  CHECK(s.stats.accepted > 0);
  CHECK(s.stats.mean_basis == doctest::Approx(1.0));
}

TEST_CASE("tolerance proportionality on the smooth problem") {
  const auto sm = rok::make_smooth_nonlinear();
  const Vector ref = oracle::rk4(oracle::rhs_of(sm.problem), sm.y0, 0.0, 2.0, 20000);
  double prev = INFINITY;
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    IntegratorConfig c;
    c.rtol = c.atol = tol;
    const auto s = rok::integrate(sm.problem, 0.0, 2.0, sm.y0, tab(), c);
    const double err = oracle::rel(s.y, ref);
    CHECK(err < 100 * tol);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("every strategy integrates a stiff linear problem") {
  const auto lin = rok::make_linear(rok::random_stable_matrix(30, 1e4, 2));
  const auto J = lin.problem.dense_jacobian(lin.y0);
  const Vector exact = oracle::expm_apply(J, 0.5, lin.y0);
  for (auto st : {BasisStrategy::Fixed, BasisStrategy::AdaptiveResidual,
                  BasisStrategy::AdaptiveResidualMatchTol, BasisStrategy::FullSpace}) {
    for (bool ext : {false, true}) {
      CAPTURE(rok::to_string(st));
      CAPTURE(ext);
      IntegratorConfig c;
      c.strategy = st;
      c.extend = ext;
      c.fixed_M = 30;
      c.rtol = c.atol = 1e-7;
      const auto s = rok::integrate(lin.problem, 0.0, 0.5, lin.y0, tab(), c);
      CHECK(oracle::rel(s.y, exact) < 1e-4);
    }
  }
}

TEST_CASE("full space and M = N agree") {
  const auto inst = rok::make_random_nonlinear(8, 9);
  IntegratorConfig a;
  a.strategy = BasisStrategy::FullSpace;
  IntegratorConfig b;
  b.fixed_M = 8;
  const auto sa = rok::integrate(inst.problem, 0.0, 1.0, inst.y0, tab(), a);
  const auto sb = rok::integrate(inst.problem, 0.0, 1.0, inst.y0, tab(), b);
  CHECK(sa.stats.accepted == sb.stats.accepted);
  CHECK(oracle::rel(sa.y, sb.y) < 1e-10);
}

TEST_CASE("step size underflow reports its counters") {
  const auto lin = rok::make_linear(rok::random_stable_matrix(20, 1e6, 3));
  IntegratorConfig c;
  c.fixed_M = 1;
  c.h_min = 1e-3;
  c.h_init = 1e-2;
  c.rtol = c.atol = 1e-10;
  rok::RunStats stats;
  CHECK_THROWS_AS(rok::integrate(lin.problem, 0.0, 1.0, lin.y0, tab(), c, &stats), rok::StepSizeUnderflow);
  CHECK(stats.rejected + stats.failed > 0);

  IntegratorConfig few;
  few.max_steps = 3;
  const auto d = rok::make_dahlquist(-1.0);
  CHECK_THROWS_AS(rok::integrate(d.problem, 0.0, 1.0, d.y0, tab(), few), rok::StepSizeUnderflow);
}

TEST_CASE("equilibrium start takes trivial steps") {
  const auto d = rok::make_dahlquist(-1.0);
  IntegratorConfig c;
  const auto s = rok::integrate(d.problem, 0.0, 1.0, Vector::Zero(1), tab(), c);
  CHECK(s.y(0) == 0.0);
  CHECK(s.stats.trivial > 0);
}

TEST_CASE("the final step lands on tF and the trace is consistent") {
  const auto d = rok::make_dahlquist(-3.0);
  IntegratorConfig c;
  c.record_trace = true;
  c.h_max = 0.07;
  const auto s = rok::integrate(d.problem, 0.0, 1.0, d.y0, tab(), c);
  CHECK(s.t == 1.0);
  REQUIRE(!s.trace.empty());
  double t = 0.0;
  std::int64_t acc = 0;
  for (const auto& tr : s.trace) {
    CHECK(tr.h <= 0.07);
    if (tr.accepted) {
      t += tr.h;
      ++acc;
      CHECK(tr.err <= 1.0);
    }
  }
  CHECK(acc == s.stats.accepted);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("error norm") {
  Vector a(2), b(2);
  a << 1.0, -2.0;
  b << 1.1, -2.0;
  // rms of (0.1 / (1e-3 + 1e-2 * 1), 0)
  CHECK(rok::error_norm(a, b, 1e-2, 1e-3) == doctest::Approx(std::sqrt(0.5) * 0.1 / 0.011));
}

TEST_CASE("strategy names and validation") {
  for (auto st : {BasisStrategy::Fixed, BasisStrategy::AdaptiveResidual,
                  BasisStrategy::AdaptiveResidualMatchTol, BasisStrategy::FullSpace})
    CHECK(rok::parse_basis_strategy(rok::to_string(st)) == st);
  CHECK_THROWS_AS(rok::parse_basis_strategy("krylov"), rok::ConfigError);

  IntegratorConfig c;
  c.rtol = -1.0;
  CHECK_THROWS_AS(c.validate(), rok::ConfigError);
  c = {};
  c.fac_min = 2.0;
  CHECK_THROWS_AS(c.validate(), rok::ConfigError);
  c = {};
  c.fixed_M = 0;
  CHECK_THROWS_AS(c.validate(), rok::ConfigError);
  CHECK_NOTHROW(IntegratorConfig{}.validate());
}

TEST_CASE("repeated runs are bitwise identical") {
  const auto inst = rok::make_random_nonlinear(30, 4);
  IntegratorConfig c;
  c.strategy = BasisStrategy::AdaptiveResidualMatchTol;
  c.extend = true;
  const auto a = rok::integrate(inst.problem, 0.0, 1.0, inst.y0, tab(), c);
  const auto b = rok::integrate(inst.problem, 0.0, 1.0, inst.y0, tab(), c);
  CHECK(a.y == b.y);
  CHECK(a.stats.accepted == b.stats.accepted);
}
}
