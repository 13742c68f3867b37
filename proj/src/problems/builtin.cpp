#include <cmath>
#include <random>

#include "rok/errors.hpp"
#include "rok/problems.hpp"

namespace rok {

ProblemInstance make_linear(const DenseMatrix& J, std::string name) {
  if (J.rows() != J.cols()) throw DimensionMismatch("make_linear: J must be square");
  const auto n = static_cast<std::size_t>(J.rows());
  OdeProblem p(
      std::move(name), n, [J](const Vector& y, Vector& out) { out.noalias() = J * y; },
      [J](const Vector&, const Vector& v, Vector& out) { out.noalias() = J * v; });
  p.with_dense_jacobian([J](const Vector&) { return J; });
  return {std::move(p), Vector::Ones(J.rows()), 0.0, 1.0, {}};
}

ProblemInstance make_dahlquist(double lambda) {
  DenseMatrix J(1, 1);
  J(0, 0) = lambda;
  auto inst = make_linear(J, "dahlquist");
  inst.exact = [lambda](double t) { return Vector::Constant(1, std::exp(lambda * t)); };
  return inst;
}

ProblemInstance make_smooth_nonlinear() {
  OdeProblem p(
      "smooth", 2,
      [](const Vector& y, Vector& out) {
        const double x2y = y(0) * y(0) * y(1);
        out(0) = 1.0 + x2y - 4.0 * y(0);
        out(1) = 3.0 * y(0) - x2y;
      },
      [](const Vector& y, const Vector& v, Vector& out) {
        const double a = 2.0 * y(0) * y(1);
        const double b = y(0) * y(0);
        out(0) = (a - 4.0) * v(0) + b * v(1);
        out(1) = (3.0 - a) * v(0) - b * v(1);
      });
  p.with_dense_jacobian([](const Vector& y) {
    const double a = 2.0 * y(0) * y(1);
    const double b = y(0) * y(0);
    DenseMatrix J(2, 2);
    J << a - 4.0, b, 3.0 - a, -b;
    return J;
  });
  Vector y0(2);
  y0 << 1.5, 3.0;
  return {std::move(p), std::move(y0), 0.0, 2.0, {}};
}

namespace {

DenseMatrix gaussian_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = normal(rng);
  return a;
}

}  // namespace

ProblemInstance make_random_nonlinear(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("random-nonlinear: n must be positive");
  std::mt19937_64 rng(seed);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  const DenseMatrix A = 0.5 * s * gaussian_matrix(n, rng) -
                        0.5 * DenseMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const DenseMatrix B = s * gaussian_matrix(n, rng);
  std::normal_distribution<double> normal;
  Vector c(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = 0.3 * normal(rng);

  OdeProblem p(
      "random-nonlinear", n,
      [A, B, c](const Vector& y, Vector& out) {
        out.noalias() = A * y + c;
        out.array() += 0.5 * (B * y).array().sin();
      },
      [A, B](const Vector& y, const Vector& v, Vector& out) {
        out.noalias() = A * v;
        out.array() += 0.5 * (B * y).array().cos() * (B * v).array();
      });
  p.with_dense_jacobian([A, B](const Vector& y) {
    DenseMatrix J = A;
    J.noalias() += 0.5 * (B * y).array().cos().matrix().asDiagonal() * B;
    return J;
  });
  return {std::move(p), Vector::Constant(static_cast<Eigen::Index>(n), 0.2), 0.0, 1.0, {}};
}

DenseMatrix random_stable_matrix(std::size_t n, double stiffness, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(n);
  const DenseMatrix S = DenseMatrix::Identity(m, m) +
                        0.3 / std::sqrt(static_cast<double>(n)) * gaussian_matrix(n, rng);
  Vector lambda(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = m > 1 ? static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
    lambda(i) = -std::pow(stiffness, t);
  }
  return S * lambda.asDiagonal() * S.inverse();
}

}  // namespace rok
