#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "rok/errors.hpp"
#include "rok/tableau.hpp"

namespace rok {

namespace {

double parse_number(const std::string& text, const std::string& where) {
  auto parse_decimal = [&](const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError(where + ": invalid number '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  const double num = parse_decimal(text.substr(0, slash));
  const double den = parse_decimal(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError(where + ": zero denominator in '" + text + "'");
  return num / den;
}

std::size_t parse_index(const std::string& text, std::size_t stages, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(where + ": invalid index '" + text + "'");
  if (stages == 0) throw ConfigError(where + ": 'stages' must be declared before coefficients");
  if (v < 1 || v > stages)
    throw ConfigError(where + ": index " + text + " outside 1.." + std::to_string(stages));
  return v - 1;
}

}  // namespace

DenseMatrix Tableau::gamma_matrix() const {
  DenseMatrix g = gamma_lower;
  g.diagonal().setConstant(gamma);
  return g;
}

DenseMatrix Tableau::beta_matrix() const { return alpha + gamma_matrix(); }

void Tableau::validate() const {
  const auto s = static_cast<Eigen::Index>(stages);
  if (stages == 0) throw ConfigError("tableau " + name + ": no stages");
  if (alpha.rows() != s || alpha.cols() != s || gamma_lower.rows() != s ||
      gamma_lower.cols() != s || b.size() != s || b_hat.size() != s)
    throw ConfigError("tableau " + name + ": coefficient arrays do not match the stage count");
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = i; j < s; ++j)
      if (alpha(i, j) != 0.0 || gamma_lower(i, j) != 0.0)
        throw ConfigError("tableau " + name + ": alpha and gamma_lower must be strictly lower triangular");
  if (!(gamma > 0.0)) throw ConfigError("tableau " + name + ": gamma must be positive");
  if (std::abs(b.sum() - 1.0) > 1e-12 || std::abs(b_hat.sum() - 1.0) > 1e-12)
    throw ConfigError("tableau " + name + ": weights b and b_hat must each sum to one");
  if (b == b_hat) throw ConfigError("tableau " + name + ": b and b_hat coincide, no error estimate");
  if (order < 1 || embedded_order < 1)
    throw ConfigError("tableau " + name + ": order and embedded_order must be declared");
}

Tableau Tableau::parse(std::istream& in, const std::string& source) {
  Tableau t;
  t.name = source;
  bool have_gamma = false;
  bool have_embedding = false;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;

    const std::string& key = tok[0];
    auto expect = [&](std::size_t n) {
      if (tok.size() != n)
        throw ConfigError(where + ": '" + key + "' expects " + std::to_string(n - 1) + " field(s)");
    };
    std::string record = key;
    for (std::size_t k = 1; k + 1 < tok.size(); ++k) record += " " + tok[k];
    if (key != "name" && !seen.insert(record).second)
      throw ConfigError(where + ": duplicate record '" + record + "'");

    if (key == "name") {
      expect(2);
      t.name = tok[1];
    } else if (key == "stages") {
      expect(2);
      if (t.stages != 0) throw ConfigError(where + ": stages declared twice");
      const double s = parse_number(tok[1], where);
      if (s < 1 || s != std::floor(s)) throw ConfigError(where + ": stages must be a positive integer");
      t.stages = static_cast<std::size_t>(s);
      const auto n = static_cast<Eigen::Index>(t.stages);
      t.alpha = DenseMatrix::Zero(n, n);
      t.gamma_lower = DenseMatrix::Zero(n, n);
      t.b = Vector::Zero(n);
      t.b_hat = Vector::Zero(n);
    } else if (key == "order" || key == "embedded_order") {
      expect(2);
      const double p = parse_number(tok[1], where);
      if (p < 1 || p != std::floor(p)) throw ConfigError(where + ": order must be a positive integer");
      (key == "order" ? t.order : t.embedded_order) = static_cast<int>(p);
    } else if (key == "gamma") {
      expect(2);
      t.gamma = parse_number(tok[1], where);
      have_gamma = true;
    } else if (key == "alpha" || key == "gamma_lower") {
      expect(4);
      const auto i = parse_index(tok[1], t.stages, where);
      const auto j = parse_index(tok[2], t.stages, where);
      if (i <= j) throw ConfigError(where + ": " + key + " requires i > j");
      DenseMatrix& m = key == "alpha" ? t.alpha : t.gamma_lower;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_number(tok[3], where);
    } else if (key == "b" || key == "b_hat") {
      expect(3);
      const auto i = parse_index(tok[1], t.stages, where);
      (key == "b" ? t.b : t.b_hat)(static_cast<Eigen::Index>(i)) = parse_number(tok[2], where);
      if (key == "b_hat") have_embedding = true;
    } else {
      throw ConfigError(where + ": unknown record '" + key + "'");
    }
  }
  if (t.stages == 0) throw ConfigError(source + ": missing 'stages'");
  if (!have_gamma) throw ConfigError(source + ": missing 'gamma'");
  if (!have_embedding) throw ConfigError(source + ": tableau has no embedded method (b_hat)");
  t.validate();
  return t;
}

Tableau Tableau::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tableau file '" + path.string() + "'");
  return parse(in, path.string());
}

std::filesystem::path default_tableau_path() {
  return std::filesystem::path(ROK_DATA_DIR) / "rok4k.tab";
}

Tableau Tableau::load_default() { return load(default_tableau_path()); }

}  // namespace rok
