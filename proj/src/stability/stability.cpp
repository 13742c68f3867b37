#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rok/errors.hpp"
#include "rok/problems.hpp"
#include "rok/stability.hpp"
#include "rok/step.hpp"

namespace rok {

namespace {

using Index = Eigen::Index;

void check_inputs(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t) {
  if (J.rows() != J.cols() || A.rows() != J.rows() || A.cols() != J.cols())
    throw DimensionMismatch("stability: J and A must be square and of equal size");
  if (static_cast<std::size_t>(J.rows()) * t.stages > kMaxBlockDim)
    throw DimensionMismatch("stability: N*s = " +
                            std::to_string(static_cast<std::size_t>(J.rows()) * t.stages) +
                            " exceeds the dense block limit " + std::to_string(kMaxBlockDim));
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DenseMatrix identity(Index n) { return DenseMatrix::Identity(n, n); }

// I - alpha (x) hJ - gamma (x) hA
DenseMatrix w_block(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t, double h) {
  const auto ns = static_cast<Index>(t.stages) * J.rows();
  return identity(ns) - kron(t.alpha, h * J) - kron(t.gamma_matrix(), h * A);
}

// I - beta (x) hJ
DenseMatrix r_block(const DenseMatrix& J, const Tableau& t, double h) {
  const auto ns = static_cast<Index>(t.stages) * J.rows();
  return identity(ns) - kron(t.beta_matrix(), h * J);
}

DenseMatrix b_row(const Tableau& t, Index n) { return kron(t.b.transpose(), identity(n)); }
DenseMatrix ones_col(const Tableau& t, Index n) {
  return kron(DenseMatrix::Ones(static_cast<Index>(t.stages), 1), identity(n));
}

Eigen::PartialPivLU<DenseMatrix> checked_lu(const DenseMatrix& m, const char* what) {
  Eigen::PartialPivLU<DenseMatrix> lu(m);
  const auto& f = lu.matrixLU();
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if (f.rows() > 0 && f.diagonal().cwiseAbs().minCoeff() <= HessenbergLU::kPivotThreshold * scale)
    throw SingularMatrix(std::string("stability: singular ") + what);
  return lu;
}

// Stage recursion of the method on y' = J y with approximation A; returns
// the stage increments and right-hand sides as supervectors.
std::pair<Vector, Vector> stage_recursion(const DenseMatrix& J, const DenseMatrix& A,
                                          const Tableau& t, double h, const Vector& y) {
  const Index n = J.rows();
  const auto s = static_cast<Index>(t.stages);
  const auto lu = checked_lu(identity(n) - h * t.gamma * A, "stage matrix I - h gamma A");
  Vector K(n * s);
  Vector F(n * s);
  for (Index i = 0; i < s; ++i) {
    Vector yi = y;
    Vector acc = Vector::Zero(n);
    for (Index j = 0; j < i; ++j) {
      yi += t.alpha(i, j) * K.segment(j * n, n);
      acc += t.gamma_lower(i, j) * K.segment(j * n, n);
    }
    F.segment(i * n, n) = J * yi;
    K.segment(i * n, n) = lu.solve(h * F.segment(i * n, n) + h * (A * acc));
  }
  return {K, F};
}

}  // namespace

std::complex<double> stability_function(const Tableau& t, std::complex<double> z) {
  const auto s = static_cast<Index>(t.stages);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(s, s) - z * t.beta_matrix().cast<std::complex<double>>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(Eigen::VectorXcd::Ones(s));
  return 1.0 + z * t.b.cast<std::complex<double>>().dot(x);
}

DenseMatrix transfer_matrix_analytic(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t,
                                     double h) {
  check_inputs(J, A, t);
  const Index n = J.rows();
  const auto lu = checked_lu(w_block(J, A, t, h), "block system");
  return identity(n) + b_row(t, n) * lu.solve(ones_col(t, n) * (h * J));
}

DenseMatrix classical_transfer_matrix(const DenseMatrix& J, const Tableau& t, double h) {
  return transfer_matrix_analytic(J, J, t, h);
}

DenseMatrix transfer_matrix_empirical(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t,
                                      double h) {
  check_inputs(J, A, t);
  const Index n = J.rows();
  DenseMatrix R(n, n);
  for (Index c = 0; c < n; ++c) {
    const Vector e = Vector::Unit(n, c);
    const Vector K = stage_recursion(J, A, t, h, e).first;
    Vector y = e;
    for (Index i = 0; i < static_cast<Index>(t.stages); ++i) y += t.b(i) * K.segment(i * n, n);
    R.col(c) = y;
  }
  return R;
}

DenseMatrix transfer_matrix_empirical(const DenseMatrix& J, const KrylovBasis& basis,
                                      const Tableau& t, double h) {
  const Index n = J.rows();
  if (static_cast<Index>(basis.dim()) != n)
    throw DimensionMismatch("transfer_matrix_empirical: basis dimension differs from J");
  const ProblemInstance lin = make_linear(J);
  DenseMatrix R(n, n);
  for (Index c = 0; c < n; ++c) {
    const Vector e = Vector::Unit(n, c);
    const Vector fe = J.col(c);
    R.col(c) = rok_step(lin.problem, e, fe, h, t, basis, false).y_new;
  }
  return R;
}

DenseMatrix krylov_approximation(const KrylovBasis& basis) {
  const auto V = basis.V();
  return V * basis.H() * V.transpose();
}

Vector stage_stability_term(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t, double h,
                            const Vector& y) {
  check_inputs(J, A, t);
  const Index n = J.rows();
  const auto ns = static_cast<Index>(t.stages) * n;
  const Vector F = stage_recursion(J, A, t, h, y).second;
  const DenseMatrix G = t.gamma_matrix();
  const auto inner = checked_lu(identity(ns) - kron(G, h * A), "I - gamma (x) hA");
  const auto outer = checked_lu(r_block(J, t, h), "I - beta (x) hJ");
  const Vector v = kron(G, h * J - h * A) * inner.solve(h * F);
  return -(b_row(t, n) * outer.solve(v));
}

Vector stage_stability_term_resolvent(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t,
                                      double h, const Vector& y) {
  check_inputs(J, A, t);
  const Index n = J.rows();
  const Vector rhs = ones_col(t, n) * (h * (J * y));
  const auto w = checked_lu(w_block(J, A, t, h), "block system");
  const auto r = checked_lu(r_block(J, t, h), "I - beta (x) hJ");
  return b_row(t, n) * (w.solve(rhs) - r.solve(rhs));
}

double check_block_identity(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t, double h) {
  check_inputs(J, A, t);
  const auto ns = static_cast<Index>(t.stages) * J.rows();
  const DenseMatrix Wi = checked_lu(w_block(J, A, t, h), "block system").solve(identity(ns));
  const DenseMatrix Ri = checked_lu(r_block(J, t, h), "I - beta (x) hJ").solve(identity(ns));
  const DenseMatrix lhs = Wi - Ri;
  const DenseMatrix rhs = -Ri * kron(t.gamma_matrix(), h * J - h * A) * Wi;
  return max_abs(lhs - rhs) / (max_abs(Wi) + max_abs(Ri));
}

Vector per_stage_stability_supervector(const DenseMatrix& J, const std::vector<DenseMatrix>& A,
                                       const Tableau& t, double h, const Vector& F) {
  const Index n = J.rows();
  const auto s = static_cast<Index>(t.stages);
  if (static_cast<Index>(A.size()) != s) throw DimensionMismatch("per-stage: need one A per stage");
  for (const auto& a : A) check_inputs(J, a, t);
  if (F.size() != n * s) throw DimensionMismatch("per-stage: F must have length N*s");
  const DenseMatrix G = t.gamma_matrix();
  DenseMatrix At = DenseMatrix::Zero(n * s, n * s);
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j <= i; ++j) At.block(i * n, j * n, n, n) = G(i, j) * A[static_cast<std::size_t>(j)];
  const auto inner = checked_lu(identity(n * s) - h * At, "I - h At");
  const auto outer = checked_lu(r_block(J, t, h), "I - beta (x) hJ");
  return outer.solve((kron(G, h * J) - h * At) * inner.solve(F));
}

double per_stage_diagonal_identity(const DenseMatrix& J, const DenseMatrix& Ai, double gamma,
                                   double h, const Vector& Fi) {
  const Index n = J.rows();
  const double hg = h * gamma;
  const auto lj = checked_lu(identity(n) - hg * J, "I - h gamma J");
  const auto la = checked_lu(identity(n) - hg * Ai, "I - h gamma A_i");
  const Vector lhs = lj.solve(hg * ((J - Ai) * la.solve(Fi)));
  const Vector rhs = lj.solve(Fi) - la.solve(Fi);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

StabilityReport stability_report(const DenseMatrix& J, const DenseMatrix& A, const Tableau& t,
                                 double h, std::size_t basis_size) {
  StabilityReport r;
  r.h = h;
  r.basis_size = basis_size;
  const auto c = spectral_radius(classical_transfer_matrix(J, t, h));
  r.rho_classic = c.value;
  try {
    const auto e = spectral_radius(transfer_matrix_analytic(J, A, t, h));
    r.rho_effective = e.value;
    r.converged = c.converged && e.converged;
  } catch (const SingularMatrix&) {
    r.rho_effective = std::numeric_limits<double>::infinity();  // step undefined at this h
    r.converged = c.converged;
  }
  return r;
}

std::vector<double> log_grid(double h_lo, double h_hi, std::size_t n) {
  if (!(h_lo > 0.0) || !(h_hi >= h_lo) || n == 0) throw ConfigError("log_grid: need 0 < h_lo <= h_hi, n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = h_lo;
    return out;
  }
  const double a = std::log10(h_lo);
  const double b = std::log10(h_hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = h_lo;
  out.back() = h_hi;
  return out;
}

double largest_stable_h(const std::vector<StabilityReport>& reports) {
  double best = 0.0;
  for (const auto& r : reports)
    if (r.rho_effective <= 1.0 + 1e-12) best = std::max(best, r.h);
  return best;
}

}  // namespace rok
