#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rok/errors.hpp"
#include "rok/linalg.hpp"

using rok::DenseMatrix;
using rok::HessenbergLU;
using rok::Vector;

TEST_SUITE("linalg") {
TEST_CASE("Hessenberg LU solves match a full-pivot solve") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = 1 + trial % 15;
    const DenseMatrix H = oracle::random_hessenberg(m, rng);
    const double hg = 0.05 + 0.1 * (trial % 7);
    const auto lu = HessenbergLU::factor(H, hg);
    const Vector b = oracle::random_vector(m, rng);
    const DenseMatrix A = DenseMatrix::Identity(m, m) - hg * H;
    const Vector x = Eigen::FullPivLU<DenseMatrix>(A).solve(b);
    CHECK(oracle::rel(lu.solve(b), x) < 1e-12);
    CHECK(lu.factorization_error() < 1e-13 * (1.0 + A.cwiseAbs().maxCoeff()));
    CHECK(lu.matrix().isApprox(A));
  }
}

TEST_CASE("pivoting swaps only neighbouring rows") {
  // a large subdiagonal forces a swap at every column
  const Eigen::Index m = 6;
  DenseMatrix H = DenseMatrix::Zero(m, m);
  for (Eigen::Index i = 1; i < m; ++i) H(i, i - 1) = -100.0;
  const auto lu = HessenbergLU::factor(H, 1.0);
  const auto& p = lu.perm();
  std::vector<bool> seen(p.size(), false);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] <= i + 1);
    seen.at(p[i]) = true;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  CHECK(p.back() == 0);
  const Vector b = Vector::LinSpaced(m, 1.0, 2.0);
  const Vector x = lu.solve(b);
  CHECK((lu.matrix() * x - b).norm() <= 1e-14 * lu.matrix().norm() * x.norm());
}

TEST_CASE("append grows the factorization like a fresh factor") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m0 = 1 + trial % 6;
    const Eigen::Index extra = 1 + trial % 4;
    DenseMatrix H = oracle::random_matrix(m0 + extra, m0 + extra, rng);
    for (Eigen::Index j = 0; j < m0; ++j)
      for (Eigen::Index i = j + 2; i < m0 + extra; ++i) H(i, j) = 0.0;
    if (trial % 2 == 0) H.bottomLeftCorner(extra, m0).setZero();
    const double hg = 0.3;
    auto lu = HessenbergLU::factor(H.topLeftCorner(m0, m0), hg);
    for (Eigen::Index m = m0; m < m0 + extra; ++m) {
      const Vector col = H.col(m).head(m + 1);
      const Vector row = H.row(m).head(m);
      lu.append({col.data(), static_cast<std::size_t>(col.size())},
                {row.data(), static_cast<std::size_t>(row.size())});
    }
    const auto fresh = HessenbergLU::factor(H, hg);
    const Vector b = oracle::random_vector(m0 + extra, rng);
    CHECK(lu.size() == static_cast<std::size_t>(m0 + extra));
    CHECK(oracle::rel(lu.solve(b), fresh.solve(b)) < 1e-12);
    CHECK(lu.factorization_error() < 1e-12);
  }
}

TEST_CASE("append with an empty row treats it as zero") {
  std::mt19937_64 rng(13);
  const DenseMatrix H = oracle::random_hessenberg(4, rng);
  DenseMatrix H5 = DenseMatrix::Zero(5, 5);
  H5.topLeftCorner(4, 4) = H;
  H5.col(4) = oracle::random_vector(5, rng);
  auto lu = HessenbergLU::factor(H, 0.2);
  const Vector col = H5.col(4);
  CHECK(lu.append({col.data(), 5}));
  const Vector b = Vector::Ones(5);
  CHECK(oracle::rel(lu.solve(b), HessenbergLU::factor(H5, 0.2).solve(b)) < 1e-13);
}

TEST_CASE("append onto a singular matrix raises") {
  DenseMatrix H = DenseMatrix::Zero(1, 1);
  auto lu = HessenbergLU::factor(H, 1.0);
  // I - H2 = [[1, -1], [-1, 1]]
  const double col[2] = {1.0, 0.0};
  const double row[1] = {1.0};
  CHECK_THROWS_AS(lu.append(col, row), rok::SingularMatrix);
}

TEST_CASE("singular reduced matrix raises") {
  DenseMatrix H = DenseMatrix::Zero(3, 3);
  H(0, 0) = 1.0;  // I - H has a zero in the (0,0) position and zero row
  CHECK_THROWS_AS(HessenbergLU::factor(H, 1.0), rok::SingularMatrix);
}

TEST_CASE("spectral radius agrees with the eigen solver") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 1 + trial % 20;
    const DenseMatrix a = oracle::random_matrix(n, n, rng);
    const auto r = rok::spectral_radius(a);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(oracle::eig_radius(a)).epsilon(1e-10));
  }
  DenseMatrix rot(2, 2);
  rot << 0.0, -2.0, 2.0, 0.0;
  CHECK(rok::spectral_radius(rot).value == doctest::Approx(2.0));
  CHECK(rok::spectral_radius(DenseMatrix::Zero(3, 3)).value == 0.0);
}

TEST_CASE("max_abs") {
  DenseMatrix a(2, 2);
  a << 1, -3, 2, 0.5;
  CHECK(rok::max_abs(a) == 3.0);
}
}
