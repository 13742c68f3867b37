#pragma once

#include <cstddef>
#include <vector>

#include "rok/linalg.hpp"
#include "rok/problems.hpp"

namespace rok {

struct ArnoldiOptions {
  /// Happy breakdown when the orthogonalized remainder falls below
  /// breakdown_tol * ||J v_i||.
  double breakdown_tol = 1e-12;
  /// extend() is a no-op when the remainder of w is below drop_tol * ||w||.
  double drop_tol = 1e-12;
  /// Another Gram-Schmidt pass runs while a pass shrinks the vector below
  /// this fraction of its previous norm (at most three passes).
  double reorth_ratio = 0.5;
  /// A start vector with norm at or below this raises ZeroStartVector.
  double zero_start = 1e-300;
};

/// Orthonormal basis V = [v_1..v_M, vbar_1..vbar_r] of the Krylov space
/// K_M(J, f), optionally extended with r arbitrary vectors, and the projected
/// matrix H.
///
/// For the core Arnoldi part J V_M = V_M H_M + h_next v_next e_M^T. Extension
/// columns hold V^T J vbar_k in full; below the core block the rows of an
/// extension vector are zero, so
///   J V = V H + h_next v_next e_M^T + (I - V V^T) J Vbar.
class KrylovBasis {
 public:
  KrylovBasis() = default;

  std::size_t dim() const { return static_cast<std::size_t>(store_.rows()); }
  std::size_t size() const { return core_ + ext_; }
  std::size_t core_size() const { return core_; }
  std::size_t ext_count() const { return ext_; }

  /// N x size() orthonormal columns.
  auto V() const { return store_.leftCols(static_cast<Eigen::Index>(size())); }
  auto column(std::size_t j) const { return store_.col(static_cast<Eigen::Index>(j)); }
  const DenseMatrix& H() const { return h_; }
  /// h_{M+1,M}; exactly zero after a happy breakdown.
  double h_next() const { return h_next_; }
  /// v_{M+1}; empty after a happy breakdown.
  const Vector& v_next() const { return v_next_; }
  bool breakdown() const { return v_next_.size() == 0; }
  double beta() const { return beta_; }
  /// J applied to each extension vector, N x ext_count().
  auto jv_ext() const { return jv_ext_.leftCols(static_cast<Eigen::Index>(ext_)); }

 private:
  friend class ArnoldiProcess;

  DenseMatrix store_;   // N x capacity
  DenseMatrix h_;       // size x size
  DenseMatrix jv_ext_;  // N x capacity for extensions
  Vector v_next_;
  double h_next_ = 0.0;
  double beta_ = 0.0;
  std::size_t core_ = 0;
  std::size_t ext_ = 0;
};

/// Fixed-size basis, M clamped to the problem dimension. Stops early on a
/// happy breakdown.
KrylovBasis build_fixed(const OdeProblem& problem, const Vector& y, const Vector& f,
                        std::size_t M, WorkCount* work = nullptr,
                        const ArnoldiOptions& opts = {});

struct AdaptiveBuild {
  KrylovBasis basis;
  double residual = 0.0;   // first-stage residual norm at the returned size
  bool hit_max = false;    // no tested size met the tolerance
  std::size_t tests = 0;   // reduced solves performed
};

/// Grow the basis one Arnoldi vector at a time. At every size in
/// `test_indices` (and at M_max) solve (I - h*gamma*H) lambda_1 = h*beta*e_1
/// and stop once |h*gamma*h_{M+1,M}| * |e_M^T lambda_1| <= resid_tol.
AdaptiveBuild build_adaptive(const OdeProblem& problem, const Vector& y, const Vector& f,
                             double h, double gamma, double resid_tol, std::size_t M_max,
                             const std::vector<std::size_t>& test_indices,
                             WorkCount* work = nullptr, const ArnoldiOptions& opts = {});

/// Append w (orthonormalized against the current basis) and the matching
/// column/row of H. Returns false and leaves the basis untouched when w is
/// already in the span.
bool extend(KrylovBasis& basis, const OdeProblem& problem, const Vector& y, const Vector& w,
            WorkCount* work = nullptr, const ArnoldiOptions& opts = {});

/// |h * gamma * h_{M+1,M}| * |e_M^T lambda_1|, M = core size.
double first_stage_residual_norm(double h, double gamma, const KrylovBasis& basis,
                                 const Vector& lambda1);

/// {1,2,3,4,6,8,11,15,20,27,36,48}
std::vector<std::size_t> default_test_indices();

}  // namespace rok
