#include <charconv>
#include <cmath>

#include "rok/errors.hpp"
#include "rok/problems.hpp"

namespace rok {

std::string ProblemParams::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ProblemParams::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("problem." + key + ": expected a number, got '" + it->second + "'");
  }
}

long ProblemParams::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("problem." + key + ": expected an integer, got '" + s + "'");
  return v;
}

void ProblemRegistry::add(const std::string& name, Factory factory, std::string help) {
  entries_[name] = Entry{std::move(factory), std::move(help)};
}

ProblemInstance ProblemRegistry::make(const std::string& name, const ProblemParams& params) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ConfigError("unknown problem '" + name + "'");
  return it->second.factory(params);
}

std::vector<std::string> ProblemRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

const std::string& ProblemRegistry::help(const std::string& name) const {
  return entries_.at(name).help;
}

namespace {

std::size_t positive_size(const ProblemParams& p, const std::string& key, long fallback) {
  const long v = p.get_int(key, fallback);
  if (v <= 0) throw ConfigError("problem." + key + " must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

ProblemRegistry ProblemRegistry::with_builtins() {
  ProblemRegistry r;
  r.add(
      "dahlquist",
      [](const ProblemParams& p) {
        const double lambda = p.get_double("lambda", -1.0);
        const double y0 = p.get_double("y0", 1.0);
        auto inst = make_dahlquist(lambda);
        inst.y0(0) = y0;
        inst.exact = [lambda, y0](double t) { return Vector::Constant(1, y0 * std::exp(lambda * t)); };
        inst.t_final = p.get_double("t_final", 1.0);
        return inst;
      },
      "scalar y' = lambda*y (keys: lambda, y0, t_final)");
  r.add(
      "linear",
      [](const ProblemParams& p) {
        const std::size_t n = positive_size(p, "n", 8);
        const auto seed = static_cast<std::uint64_t>(p.get_int("seed", 1));
        auto inst = make_linear(random_stable_matrix(n, p.get_double("stiffness", 100.0), seed));
        inst.t_final = p.get_double("t_final", 1.0);
        return inst;
      },
      "y' = J y with random non-normal stable J, y0 = ones (keys: n, stiffness, seed, t_final)");
  r.add(
      "smooth", [](const ProblemParams&) { return make_smooth_nonlinear(); },
      "2-dimensional Brusselator (A=1, B=3) on [0, 2]");
  r.add(
      "random-nonlinear",
      [](const ProblemParams& p) {
        auto inst = make_random_nonlinear(positive_size(p, "n", 12),
                                          static_cast<std::uint64_t>(p.get_int("seed", 1)));
        inst.t_final = p.get_double("t_final", 1.0);
        return inst;
      },
      "f(y) = A y + 0.5 sin(B y) + c with random A, B, c (keys: n, seed, t_final)");
  r.add(
      "allen-cahn",
      [](const ProblemParams& p) {
        AllenCahnSpec spec;
        spec.nx = positive_size(p, "nx", 64);
        spec.ny = positive_size(p, "ny", static_cast<long>(spec.nx));
        spec.alpha = p.get_double("alpha", 1.0);
        spec.gamma_rc = p.get_double("gamma", 1.0);
        return make_allen_cahn(spec);
      },
      "2-D Allen-Cahn on [0,1]^2, t in [0, 0.2] (keys: nx, ny, alpha, gamma)");
  return r;
}

}  // namespace rok
