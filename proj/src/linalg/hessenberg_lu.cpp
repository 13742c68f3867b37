#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rok/errors.hpp"
#include "rok/linalg.hpp"

namespace rok {

double max_abs(const DenseMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

HessenbergLU HessenbergLU::factor(const DenseMatrix& H, double hg) {
  if (H.rows() != H.cols())
    throw DimensionMismatch("HessenbergLU::factor: H must be square");
  HessenbergLU f;
  f.hg_ = hg;
  f.a_ = DenseMatrix::Identity(H.rows(), H.cols()) - hg * H;
  f.factor_in_place();
  return f;
}

void HessenbergLU::factor_in_place() {
  const Eigen::Index m = a_.rows();
  scale_ = std::max(1.0, max_abs(a_));
  u_ = a_;
  l_ = DenseMatrix::Identity(m, m);
  perm_.resize(static_cast<std::size_t>(m));
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});

  for (Eigen::Index k = 0; k < m; ++k) {
    // candidates: rows at or below k with a nonzero in column k
    Eigen::Index p = k;
    double best = std::abs(u_(k, k));
    for (Eigen::Index i = k + 1; i < m; ++i) {
      const double v = std::abs(u_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= kPivotThreshold * scale_)
      throw SingularMatrix("HessenbergLU: pivot " + std::to_string(best) + " below threshold at column " +
                           std::to_string(k));
    if (p != k) {
      u_.row(k).swap(u_.row(p));
      l_.row(k).head(k).swap(l_.row(p).head(k));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
    }
    const double piv = u_(k, k);
    for (Eigen::Index i = k + 1; i < m; ++i) {
      if (u_(i, k) == 0.0) continue;
      const double mult = u_(i, k) / piv;
      l_(i, k) = mult;
      u_(i, k) = 0.0;
      u_.row(i).tail(m - k - 1) -= mult * u_.row(k).tail(m - k - 1);
    }
  }
}

Vector HessenbergLU::solve(const Vector& rhs) const {
  const Eigen::Index m = u_.rows();
  if (rhs.size() != m)
    throw DimensionMismatch("HessenbergLU::solve: rhs has length " + std::to_string(rhs.size()) +
                            ", expected " + std::to_string(m));
  Vector x(m);
  for (Eigen::Index i = 0; i < m; ++i) x(i) = rhs(static_cast<Eigen::Index>(perm_[static_cast<std::size_t>(i)]));
  for (Eigen::Index i = 1; i < m; ++i) x(i) -= l_.row(i).head(i).dot(x.head(i));
  for (Eigen::Index i = m - 1; i >= 0; --i) {
    x(i) -= u_.row(i).tail(m - i - 1).dot(x.tail(m - i - 1));
    x(i) /= u_(i, i);
  }
  return x;
}

bool HessenbergLU::append(std::span<const double> h_column, std::span<const double> h_row) {
  const Eigen::Index m = u_.rows();
  if (static_cast<Eigen::Index>(h_column.size()) != m + 1)
    throw DimensionMismatch("HessenbergLU::append: column must have length M+1");
  if (!h_row.empty() && static_cast<Eigen::Index>(h_row.size()) != m)
    throw DimensionMismatch("HessenbergLU::append: row must have length M");

  DenseMatrix a(m + 1, m + 1);
  a.topLeftCorner(m, m) = a_;
  for (Eigen::Index i = 0; i <= m; ++i) a(i, m) = -hg_ * h_column[static_cast<std::size_t>(i)];
  a(m, m) += 1.0;
  for (Eigen::Index j = 0; j < m; ++j)
    a(m, j) = h_row.empty() ? 0.0 : -hg_ * h_row[static_cast<std::size_t>(j)];
  a_ = std::move(a);
  const double new_scale = std::max(scale_, max_abs(a_));

  // u = L^{-1} P b
  Vector u(m);
  for (Eigen::Index i = 0; i < m; ++i) u(i) = a_(static_cast<Eigen::Index>(perm_[static_cast<std::size_t>(i)]), m);
  for (Eigen::Index i = 1; i < m; ++i) u(i) -= l_.row(i).head(i).dot(u.head(i));

  // l^T U = c^T
  Vector l = Vector::Zero(m);
  if (!h_row.empty()) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double s = a_(m, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(k) * u_(k, j);
      l(j) = s / u_(j, j);
    }
  }
  const double pivot = a_(m, m) - l.dot(u);

  if (std::abs(pivot) <= kPivotThreshold * new_scale) {
    ++refactorizations_;
    factor_in_place();  // throws SingularMatrix if the grown matrix is singular
    return false;
  }

  DenseMatrix lo = DenseMatrix::Identity(m + 1, m + 1);
  lo.topLeftCorner(m, m) = l_;
  lo.row(m).head(m) = l.transpose();
  DenseMatrix up = DenseMatrix::Zero(m + 1, m + 1);
  up.topLeftCorner(m, m) = u_;
  up.col(m).head(m) = u;
  up(m, m) = pivot;
  l_ = std::move(lo);
  u_ = std::move(up);
  perm_.push_back(static_cast<std::size_t>(m));
  scale_ = new_scale;
  return true;
}

double HessenbergLU::factorization_error() const {
  const Eigen::Index m = a_.rows();
  DenseMatrix pa(m, m);
  for (Eigen::Index i = 0; i < m; ++i) pa.row(i) = a_.row(static_cast<Eigen::Index>(perm_[static_cast<std::size_t>(i)]));
  return max_abs(pa - l_ * u_);
}

}  // namespace rok
