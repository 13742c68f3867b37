#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rok/arnoldi.hpp"
#include "rok/errors.hpp"
#include "rok/kernels.hpp"

namespace rok {

namespace {

std::span<double> col_span(DenseMatrix& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}
std::span<const double> col_span(const DenseMatrix& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

class ArnoldiProcess {
 public:
  ArnoldiProcess(const OdeProblem& problem, const Vector& y, WorkCount* work,
                 const ArnoldiOptions& opts)
      : problem_(problem), y_(y), work_(work), opts_(opts) {}

  // v_1 = f / ||f||
  KrylovBasis start(const Vector& f, std::size_t capacity) {
    const double beta = kernels::nrm2(as_span(f));
    if (!(beta > opts_.zero_start))
      throw ZeroStartVector("Krylov start vector has norm " + std::to_string(beta));
    KrylovBasis b;
    const auto n = static_cast<Eigen::Index>(f.size());
    b.store_.resize(n, static_cast<Eigen::Index>(std::max<std::size_t>(capacity, 1)));
    b.store_.col(0) = f / beta;
    b.beta_ = beta;
    b.h_.resize(0, 0);
    return b;
  }

  // Multiplies the newest column by J and orthogonalizes; core_ grows by one
  // and the remainder becomes (h_next, v_next). Returns false on happy
  // breakdown, leaving h_next = 0 and no v_next.
  bool step(KrylovBasis& b) {
    const auto i = static_cast<Eigen::Index>(b.core_);  // column being multiplied
    ensure_capacity(b, b.core_ + 2);

    Vector z = problem_.jvp(y_, b.store_.col(i), work_);
    const double znorm = kernels::nrm2(as_span(z));
    Vector coeff = Vector::Zero(i + 1);
    const double rem = orthogonalize(b, z, static_cast<std::size_t>(i + 1), coeff, znorm);

    if (b.h_.rows() == i) b.h_ = DenseMatrix::Zero(1, 1);  // first column
    b.h_.col(i) = coeff;
    b.core_ = static_cast<std::size_t>(i + 1);

    if (rem <= opts_.breakdown_tol * znorm) {
      b.h_next_ = 0.0;
      b.v_next_.resize(0);
      return false;
    }
    // h_{i+1,i} stays out of H until the next vector is accepted.
    z /= rem;
    b.h_next_ = rem;
    b.v_next_ = std::move(z);
    return true;
  }

  // Promote v_next to a basis column, filling in the subdiagonal entry.
  void accept_next(KrylovBasis& b) {
    const auto m = static_cast<Eigen::Index>(b.core_);
    b.store_.col(m) = b.v_next_;
    DenseMatrix h = DenseMatrix::Zero(m + 1, m + 1);
    h.topLeftCorner(m, m) = b.h_;
    h(m, m - 1) = b.h_next_;
    b.h_ = std::move(h);
    // core_ is advanced by the following step()
  }

  // Modified Gram-Schmidt against the first `cols` columns with selective
  // reorthogonalization. Coefficients accumulate into `coeff`.
  double orthogonalize(const KrylovBasis& b, Vector& z, std::size_t cols, Vector& coeff,
                       double norm_before) const {
    double before = norm_before;
    double after = before;
    for (int pass = 0; pass < 3; ++pass) {
      for (std::size_t j = 0; j < cols; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double c = kernels::dot(col_span(b.store_, jj), as_span(z));
        kernels::axpy(-c, col_span(b.store_, jj), as_span(z));
        coeff(jj) += c;
      }
      after = kernels::nrm2(as_span(z));
      if (after >= opts_.reorth_ratio * before) break;
      before = after;
    }
    return after;
  }

  bool append_vector(KrylovBasis& b, const Vector& w) {
    const double wnorm = kernels::nrm2(as_span(w));
    if (wnorm == 0.0) return false;
    const std::size_t d = b.size();
    Vector z = w;
    Vector coeff = Vector::Zero(static_cast<Eigen::Index>(d));
    const double rem = orthogonalize(b, z, d, coeff, wnorm);
    if (rem <= opts_.drop_tol * wnorm) return false;
    z /= rem;

    ensure_capacity(b, d + 1);
    const auto dd = static_cast<Eigen::Index>(d);
    b.store_.col(dd) = z;
    if (b.jv_ext_.cols() <= static_cast<Eigen::Index>(b.ext_)) {
      DenseMatrix grown(b.store_.rows(), static_cast<Eigen::Index>(2 * b.ext_ + 2));
      if (b.ext_ > 0)
        grown.leftCols(static_cast<Eigen::Index>(b.ext_)) = b.jv_ext_.leftCols(static_cast<Eigen::Index>(b.ext_));
      b.jv_ext_ = std::move(grown);
    }
    Vector jz = problem_.jvp(y_, z, work_);

    DenseMatrix h = DenseMatrix::Zero(dd + 1, dd + 1);
    h.topLeftCorner(dd, dd) = b.h_;
    for (Eigen::Index j = 0; j <= dd; ++j) h(j, dd) = kernels::dot(col_span(b.store_, j), as_span(jz));
    const auto m = static_cast<Eigen::Index>(b.core_);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(b.ext_); ++k)
      h(dd, m + k) = kernels::dot(as_span(z), col_span(b.jv_ext_, k));
    b.jv_ext_.col(static_cast<Eigen::Index>(b.ext_)) = jz;
    b.h_ = std::move(h);
    ++b.ext_;
    return true;
  }

 private:
  static void ensure_capacity(KrylovBasis& b, std::size_t cols) {
    const auto need = static_cast<Eigen::Index>(cols);
    if (b.store_.cols() >= need) return;
    DenseMatrix grown(b.store_.rows(), std::max(need, 2 * b.store_.cols()));
    grown.leftCols(b.store_.cols()) = b.store_;
    b.store_ = std::move(grown);
  }

  const OdeProblem& problem_;
  const Vector& y_;
  WorkCount* work_;
  const ArnoldiOptions& opts_;
};

KrylovBasis build_fixed(const OdeProblem& problem, const Vector& y, const Vector& f,
                        std::size_t M, WorkCount* work, const ArnoldiOptions& opts) {
  if (M == 0) throw DimensionMismatch("build_fixed: basis size must be at least 1");
  M = std::min(M, problem.dim());
  ArnoldiProcess proc(problem, y, work, opts);
  KrylovBasis b = proc.start(f, M + 1);
  while (true) {
    if (!proc.step(b)) break;
    if (b.core_size() >= M) break;
    proc.accept_next(b);
  }
  return b;
}

AdaptiveBuild build_adaptive(const OdeProblem& problem, const Vector& y, const Vector& f,
                             double h, double gamma, double resid_tol, std::size_t M_max,
                             const std::vector<std::size_t>& test_indices, WorkCount* work,
                             const ArnoldiOptions& opts) {
  if (!(h > 0.0) || !(gamma > 0.0) || !(resid_tol > 0.0))
    throw ConfigError("build_adaptive: h, gamma and resid_tol must be positive");
  if (M_max == 0) throw DimensionMismatch("build_adaptive: M_max must be at least 1");
  M_max = std::min(M_max, problem.dim());

  ArnoldiProcess proc(problem, y, work, opts);
  AdaptiveBuild out;
  out.basis = proc.start(f, std::min<std::size_t>(M_max + 1, 16));
  KrylovBasis& b = out.basis;
  const double hg = h * gamma;

  while (true) {
    const bool more = proc.step(b);
    const std::size_t m = b.core_size();
    if (!more) {  // invariant subspace: the residual term vanishes
      out.residual = 0.0;
      return out;
    }
    const bool is_test =
        std::find(test_indices.begin(), test_indices.end(), m) != test_indices.end();
    if (is_test || m == M_max) {
      try {
        const HessenbergLU lu = HessenbergLU::factor(b.H(), hg);
        Vector rhs = Vector::Zero(static_cast<Eigen::Index>(m));
        rhs(0) = h * b.beta();
        const Vector lambda1 = lu.solve(rhs);
        ++out.tests;
        out.residual = first_stage_residual_norm(h, gamma, b, lambda1);
        if (out.residual <= resid_tol) return out;
      } catch (const SingularMatrix&) {
        // untestable at this size; keep growing
        out.residual = std::numeric_limits<double>::infinity();
      }
    }
    if (m >= M_max) {
      out.hit_max = true;
      return out;
    }
    proc.accept_next(b);
  }
}

bool extend(KrylovBasis& basis, const OdeProblem& problem, const Vector& y, const Vector& w,
            WorkCount* work, const ArnoldiOptions& opts) {
  if (!w.allFinite()) throw NonFiniteValue("extend: vector is not finite");
  if (static_cast<std::size_t>(w.size()) != basis.dim())
    throw DimensionMismatch("extend: vector has wrong length");
  ArnoldiProcess proc(problem, y, work, opts);
  return proc.append_vector(basis, w);
}

double first_stage_residual_norm(double h, double gamma, const KrylovBasis& basis,
                                 const Vector& lambda1) {
  const std::size_t m = basis.core_size();
  if (m == 0 || static_cast<std::size_t>(lambda1.size()) < m)
    throw DimensionMismatch("first_stage_residual_norm: lambda1 shorter than the core basis");
  return std::abs(h * gamma * basis.h_next()) * std::abs(lambda1(static_cast<Eigen::Index>(m - 1)));
}

std::vector<std::size_t> default_test_indices() {
  return {1, 2, 3, 4, 6, 8, 11, 15, 20, 27, 36, 48};
}

}  // namespace rok
