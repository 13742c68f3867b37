#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rok/errors.hpp"
#include "rok/stability.hpp"

using rok::DenseMatrix;
using rok::Tableau;
using rok::Vector;

namespace {

const Tableau& tab() {
  static const Tableau t = Tableau::load_default();
  return t;
}

}  // namespace

TEST_SUITE("stability") {
TEST_CASE("stability function matches the scalar stage recursion") {
  for (std::complex<double> z : {std::complex<double>{0, 0}, {-1, 0}, {-10, 3}, {0.5, -2}, {-1e4, 1e2}})
    CHECK(std::abs(rok::stability_function(tab(), z) - oracle::scalar_stability(tab(), z)) <
          1e-13 * (1.0 + std::abs(oracle::scalar_stability(tab(), z))));
  CHECK(std::abs(rok::stability_function(tab(), 0.0) - 1.0) < 1e-15);
}

TEST_CASE("A-stability along the imaginary axis and the left half plane") {
  for (double y = 0.0; y < 1e3; y = 1.3 * y + 0.01)
    CHECK(std::abs(rok::stability_function(tab(), {0.0, y})) <= 1.0 + 1e-12);
  for (double x = -1e-2; x > -1e6; x *= 1.7) CHECK(std::abs(rok::stability_function(tab(), x)) <= 1.0);
}

TEST_CASE("classical transfer matrix on a diagonal J is diag R(h lambda)") {
  DenseMatrix J = DenseMatrix::Zero(3, 3);
  J.diagonal() << -1.0, -20.0, -300.0;
  const double h = 0.1;
  const DenseMatrix R = rok::classical_transfer_matrix(J, tab(), h);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(R(i, i) == doctest::Approx(oracle::scalar_stability(tab(), h * J(i, i)).real()).epsilon(1e-13));
  CHECK(std::abs(R(0, 1)) < 1e-15);
}

TEST_CASE("analytic and empirical transfer matrices agree") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 4 + trial;
    const DenseMatrix J = rok::random_stable_matrix(n, 100.0, 300 + trial);
    const DenseMatrix A = J + oracle::random_matrix(n, n, rng, 0.5);
    const double h = 0.01 * (1 + trial);
    const DenseMatrix Ra = rok::transfer_matrix_analytic(J, A, tab(), h);
    CHECK(oracle::rel(rok::transfer_matrix_empirical(J, A, tab(), h), Ra) < 1e-11);
    // empirical from the W-step oracle, column by column
    DenseMatrix Rw(n, n);
    const auto f = [&J](const Vector& y) -> Vector { return J * y; };
    for (Eigen::Index j = 0; j < n; ++j)
      Rw.col(j) = oracle::w_step(f, A, Vector::Unit(n, j), h, tab()).y_new;
    CHECK(oracle::rel(Rw, Ra) < 1e-11);

    auto lin = rok::make_linear(J);
    const auto basis = rok::build_fixed(lin.problem, lin.y0, J * lin.y0, 1 + trial % 3);
    const DenseMatrix Ak = rok::krylov_approximation(basis);
    CHECK(oracle::rel(rok::transfer_matrix_empirical(J, basis, tab(), h),
                      rok::transfer_matrix_analytic(J, Ak, tab(), h)) < 1e-11);
  }
}

TEST_CASE("R + S decomposition and the block identity") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 3 + trial;
    const DenseMatrix J = oracle::random_matrix(n, n, rng);
    const DenseMatrix A = oracle::random_matrix(n, n, rng);
    const double h = 0.05;
    const Vector y = oracle::random_vector(n, rng);
    const Vector lhs = rok::transfer_matrix_analytic(J, A, tab(), h) * y;
    const Vector R = rok::classical_transfer_matrix(J, tab(), h) * y;
    const Vector S = rok::stage_stability_term(J, A, tab(), h, y);
    CHECK(oracle::rel(R + S, lhs) < 1e-11);
    CHECK(oracle::rel(rok::stage_stability_term_resolvent(J, A, tab(), h, y), S) < 1e-10);
    CHECK(rok::check_block_identity(J, A, tab(), h) < 1e-11);
    CHECK(rok::stage_stability_term(J, J, tab(), h, y).norm() < 1e-14 * y.norm());
  }
}

TEST_CASE("per-stage diagnostic reduces to the shared-A term") {
  std::mt19937_64 rng(43);
  const Eigen::Index n = 5;
  const DenseMatrix J = oracle::random_matrix(n, n, rng);
  const DenseMatrix A = oracle::random_matrix(n, n, rng);
  const Vector F = oracle::random_vector(n * 4, rng);
  const double h = 0.05;
  const Vector sup = rok::per_stage_stability_supervector(J, {A, A, A, A}, tab(), h, F);
  const Vector same = rok::per_stage_stability_supervector(J, {J, J, J, J}, tab(), h, F);
  CHECK(sup.size() == n * 4);
  CHECK(same.norm() < 1e-13 * F.norm());
  for (int i = 0; i < 4; ++i)
    CHECK(rok::per_stage_diagonal_identity(J, A, tab().gamma, h, F.segment(i * n, n)) < 1e-12);
}

TEST_CASE("block size guard") {
  const DenseMatrix big = DenseMatrix::Identity(501, 501);
  CHECK_THROWS_AS(rok::transfer_matrix_analytic(big, big, tab(), 0.1), rok::DimensionMismatch);
}

TEST_CASE("reports, grids and the largest stable step") {
  const auto g = rok::log_grid(1e-3, 10.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 10.0);
  CHECK(g[2] == doctest::Approx(0.1));

  DenseMatrix J = DenseMatrix::Zero(2, 2);
  J.diagonal() << -1.0, -100.0;
  const auto r0 = rok::stability_report(J, J, tab(), 1e-12, 2);
  CHECK(r0.rho_classic == doctest::Approx(1.0));
  CHECK(r0.rho_effective == r0.rho_classic);

  std::vector<rok::StabilityReport> rs(3);
  rs[0] = {0.5, 0.9, 0.1, 1, true};
  rs[1] = {0.5, 1.5, 1.0, 1, true};
  rs[2] = {0.5, 1.0 + 1e-13, 2.0, 1, true};
  CHECK(rok::largest_stable_h(rs) == 2.0);
  rs[2].rho_effective = 1.1;
  CHECK(rok::largest_stable_h(rs) == 0.1);
  CHECK(rok::largest_stable_h({}) == 0.0);
}

TEST_CASE("singular stage matrix reports an infinite effective radius") {
  const DenseMatrix J = DenseMatrix::Constant(1, 1, -1.0);
  const DenseMatrix A = DenseMatrix::Constant(1, 1, 2.0);
  const double h = 1.0 / (2.0 * tab().gamma);
  CHECK_THROWS_AS(rok::transfer_matrix_analytic(J, A, tab(), h), rok::SingularMatrix);
  const auto r = rok::stability_report(J, A, tab(), h, 1);
  CHECK(std::isinf(r.rho_effective));
  CHECK(r.rho_classic == doctest::Approx(std::abs(rok::stability_function(tab(), -h))));
  CHECK(rok::largest_stable_h({r}) == 0.0);
}
}
