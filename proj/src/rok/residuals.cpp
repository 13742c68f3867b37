#include <string>

#include "rok/errors.hpp"
#include "rok/step.hpp"

namespace rok {

namespace {

void check_stage(const StepInternals& in, std::size_t i) {
  if (i >= in.k.size())
    throw DimensionMismatch("stage index " + std::to_string(i) + " out of range");
}

double gamma_ij(const Tableau& t, std::size_t i, std::size_t j) {
  return i == j ? t.gamma : t.gamma_lower(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

// - h h_{M+1,M} v_{M+1} e_M^T lam
void add_overflow_term(const StepInternals& in, const Vector& lam, Vector& r) {
  const KrylovBasis& b = in.basis;
  if (b.breakdown()) return;
  const auto m = static_cast<Eigen::Index>(b.core_size());
  r -= (in.h * b.h_next() * lam(m - 1)) * b.v_next();
}

}  // namespace

Vector combined_lambda(const Tableau& tableau, const StepInternals& in, std::size_t i,
                       std::size_t dim) {
  check_stage(in, i);
  Vector lam = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j <= i; ++j) {
    const double g = gamma_ij(tableau, i, j);
    if (g == 0.0) continue;
    const Vector& l = in.lambda[j];
    if (static_cast<std::size_t>(l.size()) > dim)
      throw DimensionMismatch("combined_lambda: stage vector longer than the target dimension");
    lam.head(l.size()) += g * l;
  }
  return lam;
}

Vector stage_residual_formula(const OdeProblem& problem, const Tableau& tableau,
                              const StepInternals& in, std::size_t i, WorkCount* work) {
  check_stage(in, i);
  if (in.basis.ext_count() != 0)
    throw Error("stage_residual_formula: step was taken with an extended basis");
  const KrylovBasis& b = in.basis;
  const std::size_t m = b.size();

  Vector defect = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  for (std::size_t j = 0; j <= i; ++j) {
    const double g = gamma_ij(tableau, i, j);
    if (g != 0.0) defect += g * (in.F[j] - b.V() * in.psi[j]);
  }
  Vector r = -(in.h * in.h) * problem.jvp(in.y, defect, work);
  add_overflow_term(in, combined_lambda(tableau, in, i, m), r);
  return r;
}

Vector stage_residual_formula_extended(const Tableau& tableau, const StepInternals& in,
                                       std::size_t i) {
  check_stage(in, i);
  const KrylovBasis& b = in.basis;
  const std::size_t d = in.stage_dim[i];
  const std::size_t m = b.core_size();
  const Vector lam = combined_lambda(tableau, in, i, d);

  Vector r = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  add_overflow_term(in, lam, r);
  if (d > m) {
    const auto ext = static_cast<Eigen::Index>(d - m);
    Vector jw = b.jv_ext().leftCols(ext) * lam.tail(ext);
    const auto Vi = b.V().leftCols(static_cast<Eigen::Index>(d));
    jw -= Vi * (Vi.transpose() * jw);
    r -= in.h * jw;
  }
  return r;
}

Vector direct_stage_residual(const OdeProblem& problem, const Tableau& tableau,
                             const StepInternals& in, std::size_t i, WorkCount* work) {
  check_stage(in, i);
  Vector gk = Vector::Zero(in.k[i].size());
  for (std::size_t j = 0; j <= i; ++j) {
    const double g = gamma_ij(tableau, i, j);
    if (g != 0.0) gk += g * in.k[j];
  }
  return in.k[i] - in.h * in.F[i] - in.h * problem.jvp(in.y, gk, work);
}

}  // namespace rok
