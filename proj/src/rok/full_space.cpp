#include <Eigen/SparseLU>

#include "rok/errors.hpp"
#include "rok/integrator.hpp"

namespace rok {

struct FullSpaceStepper::Impl {
  bool sparse = false;
  DenseMatrix J;
  SparseMatrix Js;
  double h = -1.0;  // step size of the cached factorization
  Eigen::PartialPivLU<DenseMatrix> dense_lu;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> sparse_lu;

  Vector apply(const Vector& v) const { return sparse ? Vector(Js * v) : Vector(J * v); }

  void factor(double hg_step, double hg) {
    if (h == hg_step) return;
    const auto n = sparse ? Js.rows() : J.rows();
    if (sparse) {
      SparseMatrix I(n, n);
      I.setIdentity();
      SparseMatrix A = I - hg * Js;
      A.makeCompressed();
      sparse_lu.compute(A);
      if (sparse_lu.info() != Eigen::Success) throw SingularMatrix("full-space: sparse LU failed");
    } else {
      dense_lu.compute(DenseMatrix::Identity(n, n) - hg * J);
      // PartialPivLU never reports failure; check the pivots directly
      const auto& lu = dense_lu.matrixLU();
      const double scale = std::max(1.0, lu.cwiseAbs().maxCoeff());
      if (lu.diagonal().cwiseAbs().minCoeff() <= HessenbergLU::kPivotThreshold * scale)
        throw SingularMatrix("full-space: dense LU has a zero pivot");
    }
    h = hg_step;
  }

  Vector solve(const Vector& rhs) const {
    return sparse ? Vector(sparse_lu.solve(rhs)) : Vector(dense_lu.solve(rhs));
  }
};

FullSpaceStepper::FullSpaceStepper(const OdeProblem& problem, const Tableau& tableau)
    : problem_(problem), tableau_(tableau), impl_(std::make_shared<Impl>()) {}

void FullSpaceStepper::set_state(const Vector& y, WorkCount* work) {
  impl_->sparse = problem_.has_sparse_jacobian();
  if (impl_->sparse)
    impl_->Js = problem_.sparse_jacobian(y, work);
  else
    impl_->J = problem_.dense_jacobian(y, work);
  impl_->h = -1.0;
}

std::pair<Vector, Vector> FullSpaceStepper::step(const Vector& y, const Vector& fy, double h,
                                                 WorkCount* work) {
  const auto si = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  const std::size_t s = tableau_.stages;
  impl_->factor(h, h * tableau_.gamma);
  std::vector<Vector> k;
  k.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    Vector F;
    if (i == 0) {
      F = fy;
    } else {
      Vector yi = y;
      for (std::size_t j = 0; j < i; ++j) yi += tableau_.alpha(si(i), si(j)) * k[j];
      F = problem_.rhs(yi, work);
    }
    Vector acc = Vector::Zero(y.size());
    for (std::size_t j = 0; j < i; ++j) acc += tableau_.gamma_lower(si(i), si(j)) * k[j];
    k.push_back(impl_->solve(h * F + h * impl_->apply(acc)));
  }
  Vector y_new = y;
  Vector y_emb = y;
  for (std::size_t i = 0; i < s; ++i) {
    y_new += tableau_.b(si(i)) * k[i];
    y_emb += tableau_.b_hat(si(i)) * k[i];
  }
  if (!y_new.allFinite() || !y_emb.allFinite())
    throw NonFiniteValue("full-space step: non-finite stage result");
  return {std::move(y_new), std::move(y_emb)};
}

}  // namespace rok
