#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rok/errors.hpp"
#include "rok/problems.hpp"

using rok::DenseMatrix;
using rok::Vector;

TEST_SUITE("problems") {
TEST_CASE("jvp of every built-in problem matches finite differences") {
  const auto reg = rok::ProblemRegistry::with_builtins();
  for (const auto& name : reg.names()) {
    CAPTURE(name);
    rok::ProblemParams params;
    if (name == "allen-cahn") params.set("nx", "12");
    const auto inst = reg.make(name, params);
    CHECK(rok::jvp_consistency(inst.problem, inst.y0, 3) < 1e-6);

    const DenseMatrix J = inst.problem.dense_jacobian(inst.y0);
    const DenseMatrix Jfd = oracle::fd_jacobian(oracle::rhs_of(inst.problem), inst.y0);
    CHECK(oracle::rel(J, Jfd) < 1e-6);
    if (inst.problem.has_sparse_jacobian())
      CHECK(oracle::rel(DenseMatrix(inst.problem.sparse_jacobian(inst.y0)), J) < 1e-14);
  }
}

TEST_CASE("Brusselator right-hand side") {
  const auto s = rok::make_smooth_nonlinear();
  Vector y(2);
  y << 2.0, 0.5;
  const Vector f = s.problem.rhs(y);
  CHECK(f(0) == doctest::Approx(1.0 + 4.0 * 0.5 - 8.0));
  CHECK(f(1) == doctest::Approx(6.0 - 2.0));
  Vector eq(2);
  eq << 1.0, 3.0;
  CHECK(s.problem.rhs(eq).norm() == doctest::Approx(0.0));
}

TEST_CASE("Allen-Cahn: constants 0 and 1 are equilibria, diffusion conserves mass") {
  rok::AllenCahnSpec spec;
  spec.nx = 10;
  spec.ny = 7;
  spec.alpha = 0.5;
  const auto ac = rok::make_allen_cahn(spec);
  CHECK(ac.problem.dim() == 70);
  CHECK(ac.t_final == 0.2);
  CHECK(ac.problem.rhs(Vector::Ones(70)).norm() == doctest::Approx(0.0));
  CHECK(ac.problem.rhs(Vector::Zero(70)).norm() == doctest::Approx(0.0));

  spec.gamma_rc = 0.0;
  const auto heat = rok::make_allen_cahn(spec);
  std::mt19937_64 rng(3);
  const Vector u = oracle::random_vector(70, rng);
  CHECK(std::abs(heat.problem.rhs(u).sum()) < 1e-9);

  // initial profile at the first cell centre
  const double x = 0.05, y = 0.5 / 7.0;
  CHECK(ac.y0(0) == doctest::Approx(0.4 + 0.1 * (x + y) + 0.1 * std::sin(10 * x) * std::sin(20 * y)));
}

TEST_CASE("random stable matrix has the requested spectrum") {
  const DenseMatrix J = rok::random_stable_matrix(10, 1e3, 5);
  const Eigen::EigenSolver<DenseMatrix> es(J);
  const auto ev = es.eigenvalues();
  CHECK(ev.real().maxCoeff() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(ev.real().minCoeff() == doctest::Approx(-1e3).epsilon(1e-8));
  CHECK(ev.imag().cwiseAbs().maxCoeff() < 1e-6);
  CHECK(rok::random_stable_matrix(10, 1e3, 5) == J);
}

TEST_CASE("dahlquist exact solution and parameters") {
  const auto reg = rok::ProblemRegistry::with_builtins();
  rok::ProblemParams p;
  p.set("lambda", "-2.5");
  p.set("y0", "3");
  p.set("t_final", "0.5");
  const auto d = reg.make("dahlquist", p);
  CHECK(d.t_final == 0.5);
  CHECK(d.y0(0) == 3.0);
  REQUIRE(d.exact);
  CHECK(d.exact(0.5)(0) == doctest::Approx(3.0 * std::exp(-1.25)));
}

TEST_CASE("registry errors") {
  const auto reg = rok::ProblemRegistry::with_builtins();
  CHECK_THROWS_AS(reg.make("no-such-problem", {}), rok::ConfigError);
  rok::ProblemParams bad;
  bad.set("n", "-3");
  CHECK_THROWS_AS(reg.make("linear", bad), rok::ConfigError);
  rok::ProblemParams junk;
  junk.set("lambda", "abc");
  CHECK_THROWS_AS(reg.make("dahlquist", junk), rok::ConfigError);
}

TEST_CASE("user problems register by name") {
  auto reg = rok::ProblemRegistry::with_builtins();
  reg.add("decay2", [](const rok::ProblemParams&) {
    rok::OdeProblem p(
        "decay2", 2, [](const Vector& y, Vector& out) { out = -y; },
        [](const Vector&, const Vector& v, Vector& out) { out = -v; });
    return rok::ProblemInstance{std::move(p), Vector::Ones(2), 0.0, 1.0, {}};
  });
  CHECK(reg.contains("decay2"));
  const auto inst = reg.make("decay2", {});
  CHECK(inst.problem.rhs(inst.y0)(1) == -1.0);
  CHECK(inst.problem.dense_jacobian(inst.y0) == -DenseMatrix::Identity(2, 2));
}

TEST_CASE("non-finite output is rejected") {
  rok::OdeProblem p(
      "bad", 1, [](const Vector& y, Vector& out) { out(0) = std::log(y(0)); },
      [](const Vector&, const Vector& v, Vector& out) { out = v * NAN; });
  CHECK_THROWS_AS(p.rhs(Vector::Constant(1, -1.0)), rok::NonFiniteValue);
  CHECK_THROWS_AS(p.jvp(Vector::Ones(1), Vector::Ones(1)), rok::NonFiniteValue);
  CHECK_THROWS_AS(p.rhs(Vector::Ones(2)), rok::DimensionMismatch);
}

TEST_CASE("work counters") {
  const auto s = rok::make_smooth_nonlinear();
  rok::WorkCount w;
  s.problem.rhs(s.y0, &w);
  s.problem.jvp(s.y0, s.y0, &w);
  s.problem.jvp(s.y0, s.y0, &w);
  CHECK(w.rhs == 1);
  CHECK(w.jvp == 2);
}
}
