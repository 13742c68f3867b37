#include <cmath>
#include <random>
#include <vector>

#include "rok/errors.hpp"
#include "rok/problems.hpp"

namespace rok {

OdeProblem::OdeProblem(std::string name, std::size_t dim, RhsFn rhs, JvpFn jvp)
    : name_(std::move(name)), dim_(dim), rhs_(std::move(rhs)), jvp_(std::move(jvp)) {}

OdeProblem& OdeProblem::with_dense_jacobian(DenseJacobianFn fn) {
  dense_jac_ = std::move(fn);
  return *this;
}

OdeProblem& OdeProblem::with_sparse_jacobian(SparseJacobianFn fn) {
  sparse_jac_ = std::move(fn);
  return *this;
}

Vector OdeProblem::rhs(const Vector& y, WorkCount* work) const {
  if (static_cast<std::size_t>(y.size()) != dim_)
    throw DimensionMismatch("rhs: state has wrong dimension for problem " + name_);
  Vector out(y.size());
  rhs_(y, out);
  if (work) ++work->rhs;
  if (!out.allFinite()) throw NonFiniteValue("rhs of " + name_ + " is not finite");
  return out;
}

Vector OdeProblem::jvp(const Vector& y, const Vector& v, WorkCount* work) const {
  if (static_cast<std::size_t>(y.size()) != dim_ || static_cast<std::size_t>(v.size()) != dim_)
    throw DimensionMismatch("jvp: argument has wrong dimension for problem " + name_);
  Vector out(y.size());
  jvp_(y, v, out);
  if (work) ++work->jvp;
  if (!out.allFinite()) throw NonFiniteValue("jvp of " + name_ + " is not finite");
  return out;
}

DenseMatrix OdeProblem::dense_jacobian(const Vector& y, WorkCount* work) const {
  if (dense_jac_) return dense_jac_(y);
  if (sparse_jac_) return DenseMatrix(sparse_jac_(y));
  const auto n = static_cast<Eigen::Index>(dim_);
  DenseMatrix J(n, n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    J.col(j) = jvp(y, e, work);
    e(j) = 0.0;
  }
  return J;
}

SparseMatrix OdeProblem::sparse_jacobian(const Vector& y, WorkCount* work) const {
  if (sparse_jac_) return sparse_jac_(y);
  return dense_jacobian(y, work).sparseView();
}

double jvp_consistency(const OdeProblem& p, const Vector& y, std::uint64_t seed, int probes,
                       double eps) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    Vector v(y.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    v /= v.norm();
    const Vector fd = (p.rhs(y + eps * v) - p.rhs(y - eps * v)) / (2.0 * eps);
    const Vector jv = p.jvp(y, v);
    const double denom = std::max(jv.norm(), 1e-300);
    worst = std::max(worst, (fd - jv).norm() / denom);
  }
  return worst;
}

}  // namespace rok
