#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rok/linalg.hpp"

namespace rok {

/// Coefficients of an s-stage Rosenbrock-type method
///   F_i = f(y + sum_{j<i} alpha_ij k_j)
///   k_i = phi(h gamma A) (h F_i + h A sum_{j<i} gamma_ij k_j),  phi(z) = 1/(1-z)
///   y_new = y + sum b_i k_i,   y_emb = y + sum b_hat_i k_i.
struct Tableau {
  std::string name;
  std::size_t stages = 0;
  DenseMatrix alpha;        // s x s, strictly lower triangular
  DenseMatrix gamma_lower;  // s x s, strictly lower triangular
  double gamma = 0.0;       // shared diagonal
  Vector b;
  Vector b_hat;
  int order = 0;
  int embedded_order = 0;

  /// gamma_lower with gamma on the diagonal.
  DenseMatrix gamma_matrix() const;
  /// alpha + gamma_matrix()
  DenseMatrix beta_matrix() const;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Flat text format, one record per line, '#' starts a comment:
  ///   name <label>
  ///   stages <s>
  ///   order <p>
  ///   embedded_order <p_hat>
  ///   gamma <value>
  ///   alpha <i> <j> <value>          (1-based, i > j)
  ///   gamma_lower <i> <j> <value>    (1-based, i > j)
  ///   b <i> <value>
  ///   b_hat <i> <value>
  /// Values are decimal or rational ("p/q"). Omitted coefficients are zero,
  /// but at least one b_hat record is required.
  static Tableau parse(std::istream& in, const std::string& source = "<stream>");
  static Tableau load(const std::filesystem::path& path);
  /// The tableau shipped in data/rok4k.tab.
  static Tableau load_default();
};

std::filesystem::path default_tableau_path();

}  // namespace rok
