#include <string>

#include "rok/errors.hpp"
#include "rok/kernels.hpp"
#include "rok/step.hpp"

namespace rok {

namespace {

// First d basis columns as one contiguous column-major block.
std::span<const double> basis_block(const KrylovBasis& b, std::size_t d) {
  return {b.V().data(), b.dim() * d};
}

}  // namespace

StepResult rok_step(const OdeProblem& problem, const Vector& y, const Vector& fy, double h,
                    const Tableau& tableau, KrylovBasis basis, bool extend_basis,
                    WorkCount* work) {
  const std::size_t n = problem.dim();
  if (static_cast<std::size_t>(y.size()) != n || static_cast<std::size_t>(fy.size()) != n ||
      basis.dim() != n)
    throw DimensionMismatch("rok_step: state, f(y) and basis must have dimension " + std::to_string(n));
  if (!(h > 0.0)) throw Error("rok_step: step size must be positive");
  if (basis.size() == 0) throw DimensionMismatch("rok_step: empty basis");

  WorkCount local;
  WorkCount* w = work ? work : &local;
  const WorkCount before = *w;

  const std::size_t s = tableau.stages;
  const auto si = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  StepResult res;
  StepInternals& in = res.internals;
  in.h = h;
  in.extended = extend_basis;
  in.y = y;
  in.F.reserve(s);
  in.psi.reserve(s);
  in.lambda.reserve(s);
  in.k.reserve(s);

  HessenbergLU lu = HessenbergLU::factor(basis.H(), h * tableau.gamma);

  for (std::size_t i = 0; i < s; ++i) {
    Vector F;
    if (i == 0) {
      F = fy;
    } else {
      Vector yi = y;
      for (std::size_t j = 0; j < i; ++j) {
        const double a = tableau.alpha(si(i), si(j));
        if (a != 0.0) kernels::axpy(a, as_span(in.k[j]), as_span(yi));
      }
      F = problem.rhs(yi, w);
    }

    if (extend_basis && i > 0 && extend(basis, problem, y, F, w)) {
      const DenseMatrix& H = basis.H();
      const Eigen::Index last = H.rows() - 1;
      const Vector col = H.col(last);
      const Vector row = H.row(last).head(last).transpose();
      if (!lu.append(as_span(col), as_span(row))) res.stats.refactored = true;
    }

    const std::size_t d = basis.size();
    const auto V = basis_block(basis, d);
    Vector psi(si(d));
    kernels::gemv_t_cols(V, n, as_span(F), as_span(psi));

    Vector acc = Vector::Zero(si(d));
    for (std::size_t j = 0; j < i; ++j) {
      const double g = tableau.gamma_lower(si(i), si(j));
      if (g != 0.0) acc.head(in.lambda[j].size()) += g * in.lambda[j];
    }
    const Vector lambda = lu.solve(h * psi + h * (basis.H() * acc));

    // k = V (lambda - h psi) + h F
    const Vector c = lambda - h * psi;
    Vector k(si(n));
    kernels::gemv_cols(V, n, as_span(c), as_span(k));
    kernels::axpy(h, as_span(F), as_span(k));

    if (i == 0)
      res.stats.first_stage_residual = first_stage_residual_norm(h, tableau.gamma, basis, lambda);

    in.F.push_back(std::move(F));
    in.psi.push_back(std::move(psi));
    in.lambda.push_back(lambda);
    in.k.push_back(std::move(k));
    in.stage_dim.push_back(d);
  }

  res.y_new = y;
  res.y_embedded = y;
  for (std::size_t i = 0; i < s; ++i) {
    if (tableau.b(si(i)) != 0.0) kernels::axpy(tableau.b(si(i)), as_span(in.k[i]), as_span(res.y_new));
    if (tableau.b_hat(si(i)) != 0.0)
      kernels::axpy(tableau.b_hat(si(i)), as_span(in.k[i]), as_span(res.y_embedded));
  }
  if (!res.y_new.allFinite() || !res.y_embedded.allFinite())
    throw NonFiniteValue("rok_step: non-finite stage result");

  res.stats.basis_size = basis.size();
  res.stats.core_size = basis.core_size();
  res.stats.extensions = basis.ext_count();
  res.stats.rhs_evals = w->rhs - before.rhs;
  res.stats.jvp_evals = w->jvp - before.jvp;
  in.basis = std::move(basis);
  return res;
}

}  // namespace rok
