#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "rok/kernels.hpp"
#include "rok/linalg.hpp"

namespace rok {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Function-evaluation counters, owned by the caller.
struct WorkCount {
  std::int64_t rhs = 0;
  std::int64_t jvp = 0;
};

/// Autonomous ODE y' = f(y) accessed through f and Jacobian-vector products.
///
/// Callbacks must be re-entrant. `rhs` and `jvp` reject non-finite output
/// with NonFiniteValue so the step controller can shrink h.
class OdeProblem {
 public:
  using RhsFn = std::function<void(const Vector& y, Vector& out)>;
  using JvpFn = std::function<void(const Vector& y, const Vector& v, Vector& out)>;
  using DenseJacobianFn = std::function<DenseMatrix(const Vector& y)>;
  using SparseJacobianFn = std::function<SparseMatrix(const Vector& y)>;

  OdeProblem(std::string name, std::size_t dim, RhsFn rhs, JvpFn jvp);

  OdeProblem& with_dense_jacobian(DenseJacobianFn fn);
  OdeProblem& with_sparse_jacobian(SparseJacobianFn fn);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }

  Vector rhs(const Vector& y, WorkCount* work = nullptr) const;
  Vector jvp(const Vector& y, const Vector& v, WorkCount* work = nullptr) const;

  bool has_dense_jacobian() const { return static_cast<bool>(dense_jac_); }
  bool has_sparse_jacobian() const { return static_cast<bool>(sparse_jac_); }
  /// Explicit Jacobian; assembled column by column from jvp when no closed
  /// form was registered.
  DenseMatrix dense_jacobian(const Vector& y, WorkCount* work = nullptr) const;
  SparseMatrix sparse_jacobian(const Vector& y, WorkCount* work = nullptr) const;

 private:
  std::string name_;
  std::size_t dim_;
  RhsFn rhs_;
  JvpFn jvp_;
  DenseJacobianFn dense_jac_;
  SparseJacobianFn sparse_jac_;
};

/// A problem together with its initial-value data.
struct ProblemInstance {
  OdeProblem problem;
  Vector y0;
  double t0 = 0.0;
  double t_final = 1.0;
  /// Closed-form solution y(t), when known.
  std::function<Vector(double)> exact;
};

/// y' = J y. The initial state is the all-ones vector.
ProblemInstance make_linear(const DenseMatrix& J, std::string name = "linear");
ProblemInstance make_dahlquist(double lambda);

struct AllenCahnSpec {
  std::size_t nx = 64;
  std::size_t ny = 64;
  double alpha = 1.0;
  double gamma_rc = 1.0;  // reaction coefficient
};

/// u_t = alpha*Lap(u) + gamma_rc*(u - u^3) on [0,1]^2 with homogeneous
/// Neumann boundaries, t in [0, 0.2]. Cell-centred nx-by-ny grid, cell k =
/// i + nx*j at ((i+1/2)/nx, (j+1/2)/ny); 5-point Laplacian with mirror ghost
/// cells. u0 = 0.4 + 0.1(x+y) + 0.1 sin(10x) sin(20y).
ProblemInstance make_allen_cahn(const AllenCahnSpec& spec);
kernels::AllenCahnGrid allen_cahn_grid(const AllenCahnSpec& spec);

/// Brusselator with A = 1, B = 3: smooth and non-stiff on [0, 2], equilibrium
/// at (1, 3), starting from (1.5, 3).
ProblemInstance make_smooth_nonlinear();

/// f(y) = A y + 0.5 sin(B y) + c with random A, B, c; y0 = 0.2 * ones.
ProblemInstance make_random_nonlinear(std::size_t n, std::uint64_t seed);

/// Random non-normal J = S diag(lambda) S^{-1} with lambda log-spaced in
/// [-stiffness, -1].
DenseMatrix random_stable_matrix(std::size_t n, double stiffness, std::uint64_t seed);

/// Relative error of the directional finite difference against jvp on
/// `probes` random directions (central difference, step eps).
double jvp_consistency(const OdeProblem& p, const Vector& y, std::uint64_t seed, int probes = 4,
                       double eps = 1e-6);

/// String-keyed parameters handed to problem factories.
class ProblemParams {
 public:
  ProblemParams() = default;
  explicit ProblemParams(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Problems resolvable by name from the command line.
class ProblemRegistry {
 public:
  using Factory = std::function<ProblemInstance(const ProblemParams&)>;

  /// Registry pre-populated with the built-in problems.
  static ProblemRegistry with_builtins();

  void add(const std::string& name, Factory factory, std::string help = {});
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  ProblemInstance make(const std::string& name, const ProblemParams& params) const;
  std::vector<std::string> names() const;
  const std::string& help(const std::string& name) const;

 private:
  struct Entry {
    Factory factory;
    std::string help;
  };
  std::map<std::string, Entry> entries_;
};

}  // namespace rok
