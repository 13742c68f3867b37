#include <charconv>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rok/app/config.hpp"
#include "rok/app/csv.hpp"
#include "rok/errors.hpp"

namespace rok::app {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "section.key" -> line number, for diagnostics.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream in(text);
  std::string section;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line[0] == '[') {
      section = trim(line.substr(1, line.find(']') - 1));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out.emplace(section + "." + trim(line.substr(0, eq)), lineno);
  }
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source, std::map<std::string, int> lines)
      : tree_(tree), source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const {
    std::string where = source_;
    if (auto it = lines_.find(section + "." + key); it != lines_.end())
      where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": [" + section + "] " + key + ": " + msg);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void get(const std::string& sec, const std::string& key, std::string& out) {
    if (auto v = raw(sec, key)) out = *v;
  }

  double to_double(const std::string& sec, const std::string& key, const std::string& v) const {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size())
      fail(sec, key, "expected a number, got '" + v + "'");
    return d;
  }

  long long to_int(const std::string& sec, const std::string& key, const std::string& v) const {
    long long d = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || ptr != v.data() + v.size())
      fail(sec, key, "expected an integer, got '" + v + "'");
    return d;
  }

  void get(const std::string& sec, const std::string& key, double& out) {
    if (auto v = raw(sec, key)) out = to_double(sec, key, *v);
  }

  template <typename Int>
    requires std::is_integral_v<Int>
  void get(const std::string& sec, const std::string& key, Int& out) {
    if (auto v = raw(sec, key)) {
      const long long d = to_int(sec, key, *v);
      if (std::is_unsigned_v<Int> && d < 0) fail(sec, key, "must not be negative");
      out = static_cast<Int>(d);
    }
  }

  void get(const std::string& sec, const std::string& key, bool& out) {
    if (auto v = raw(sec, key)) {
      if (*v == "true" || *v == "yes" || *v == "on" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "no" || *v == "off" || *v == "0")
        out = false;
      else
        fail(sec, key, "expected true or false, got '" + *v + "'");
    }
  }

  void get(const std::string& sec, const std::string& key, std::vector<double>& out) {
    if (auto v = raw(sec, key)) {
      out.clear();
      for (const auto& item : split_list(*v)) out.push_back(to_double(sec, key, item));
    }
  }

  void get(const std::string& sec, const std::string& key, std::vector<std::size_t>& out) {
    if (auto v = raw(sec, key)) {
      out.clear();
      for (const auto& item : split_list(*v)) {
        const long long d = to_int(sec, key, item);
        if (d <= 0) fail(sec, key, "entries must be positive");
        out.push_back(static_cast<std::size_t>(d));
      }
    }
  }

  bool used(const std::string& sec, const std::string& key) const {
    return used_.count(sec + "." + key) != 0;
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
  std::map<std::string, int> lines_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace

StrategySpec StrategySpec::parse(const std::string& label) {
  StrategySpec s;
  s.label = trim(label);
  std::string body = s.label;
  constexpr std::string_view kExt = "+ext";
  if (body.size() > kExt.size() && body.compare(body.size() - kExt.size(), kExt.size(), kExt) == 0) {
    s.extend = true;
    body.resize(body.size() - kExt.size());
  }
  auto bad = [&] { return ConfigError("invalid strategy '" + label + "' (expected M=<n>, R=<tol>, R=tol or full, optional +ext)"); };
  if (body == "full") {
    s.strategy = BasisStrategy::FullSpace;
    return s;
  }
  if (body.size() < 3 || body[1] != '=') throw bad();
  const std::string value = body.substr(2);
  if (body[0] == 'M') {
    long long m = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), m);
    if (ec != std::errc() || ptr != value.data() + value.size() || m <= 0) throw bad();
    s.strategy = BasisStrategy::Fixed;
    s.M = static_cast<std::size_t>(m);
  } else if (body[0] == 'R' && value == "tol") {
    s.strategy = BasisStrategy::AdaptiveResidualMatchTol;
  } else if (body[0] == 'R') {
    double r = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), r);
    if (ec != std::errc() || ptr != value.data() + value.size() || !(r > 0.0)) throw bad();
    s.strategy = BasisStrategy::AdaptiveResidual;
    s.resid_tol = r;
  } else {
    throw bad();
  }
  return s;
}

void StrategySpec::apply(IntegratorConfig& cfg) const {
  cfg.strategy = strategy;
  cfg.extend = extend;
  if (strategy == BasisStrategy::Fixed) cfg.fixed_M = M;
  if (strategy == BasisStrategy::AdaptiveResidual) cfg.resid_tol = resid_tol;
}

ProblemParams RunConfig::effective_problem_params() const {
  ProblemParams p = problem_params;
  if (!p.has("seed")) p.set("seed", std::to_string(seed));
  return p;
}

RunConfig default_config() {
  RunConfig c;
  c.sweep.tolerances = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  for (const char* s : {"M=4", "M=16", "R=tol", "R=tol+ext"}) c.sweep.strategies.push_back(StrategySpec::parse(s));
  return c;
}

RunConfig parse_config(std::istream& in, const std::string& source,
                       const std::filesystem::path& base_dir) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  pt::ptree tree;
  try {
    std::istringstream ss(text);
    pt::read_ini(ss, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig c = default_config();
  Reader r(tree, source, key_lines(text));

  // [problem]: `name` selects the problem, every other key is a parameter
  r.get("problem", "name", c.problem);
  if (auto sec = tree.get_child_optional("problem"))
    for (const auto& [key, node] : *sec)
      if (key != "name") c.problem_params.set(key, trim(node.data()));

  std::string path;
  r.get("tableau", "path", path);
  c.tableau = resolve(base_dir, path);
  if (!c.tableau.empty() && !std::filesystem::exists(c.tableau))
    r.fail("tableau", "path", "no such file '" + c.tableau.string() + "'");

  IntegratorConfig& ic = c.integrator;
  r.get("integrator", "rtol", ic.rtol);
  r.get("integrator", "atol", ic.atol);
  if (auto v = r.raw("integrator", "strategy")) {
    try {
      ic.strategy = parse_basis_strategy(*v);
    } catch (const ConfigError& e) {
      r.fail("integrator", "strategy", e.what());
    }
  }
  r.get("integrator", "M", ic.fixed_M);
  r.get("integrator", "resid_tol", ic.resid_tol);
  r.get("integrator", "extend", ic.extend);
  r.get("integrator", "h_init", ic.h_init);
  r.get("integrator", "h_min", ic.h_min);
  r.get("integrator", "h_max", ic.h_max);
  r.get("integrator", "safety", ic.safety);
  r.get("integrator", "fac_min", ic.fac_min);
  r.get("integrator", "fac_max", ic.fac_max);
  r.get("integrator", "M_max", ic.M_max);
  r.get("integrator", "test_indices", ic.test_indices);
  r.get("integrator", "max_steps", ic.max_steps);
  r.get("integrator", "trace", ic.record_trace);
  try {
    ic.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": [integrator] " + e.what());
  }

  SweepSettings& sw = c.sweep;
  r.get("sweep", "tolerances", sw.tolerances);
  for (double t : sw.tolerances)
    if (!(t > 0.0)) r.fail("sweep", "tolerances", "tolerances must be positive");
  r.get("sweep", "atol_scale", sw.atol_scale);
  if (auto v = r.raw("sweep", "strategies")) {
    sw.strategies.clear();
    for (const auto& item : split_list(*v)) {
      try {
        sw.strategies.push_back(StrategySpec::parse(item));
      } catch (const ConfigError& e) {
        r.fail("sweep", "strategies", e.what());
      }
    }
  }
  std::string sweep_ref;
  r.get("sweep", "reference", sweep_ref);
  sw.reference = resolve(base_dir, sweep_ref).string();
  if (!sw.reference.empty() && !std::filesystem::exists(sw.reference))
    r.fail("sweep", "reference", "no such file '" + sw.reference + "'");
  r.get("sweep", "record_timing", sw.record_timing);
  r.get("sweep", "workers", sw.workers);
  if (sw.workers == 0) r.fail("sweep", "workers", "must be at least 1");

  ReferenceSettings& rs = c.reference;
  r.get("reference", "tol", rs.tol);
  r.get("reference", "cross_check", rs.cross_check);
  r.get("reference", "cross_check_tol", rs.cross_check_tol);
  r.get("reference", "agreement_tol", rs.agreement_tol);
  r.get("reference", "max_oracle_steps", rs.max_oracle_steps);

  StabilitySettings& st = c.stability;
  r.get("stability", "h_lo", st.h_lo);
  r.get("stability", "h_hi", st.h_hi);
  r.get("stability", "points", st.points);
  r.get("stability", "basis_sizes", st.basis_sizes);
  r.get("stability", "include_full", st.include_full);

  r.get("run", "seed", c.seed);
  std::string run_ref;
  r.get("run", "reference", run_ref);
  c.reference_file = resolve(base_dir, run_ref).string();
  if (!c.reference_file.empty() && !std::filesystem::exists(c.reference_file))
    r.fail("run", "reference", "no such file '" + c.reference_file + "'");

  // unknown sections or keys are most likely typos
  for (const auto& [section, node] : tree) {
    if (section == "problem") continue;
    if (!node.data().empty())
      throw ConfigError(source + ": key '" + section + "' outside of a section");
    for (const auto& [key, value] : node)
      if (!r.used(section, key)) r.fail(section, key, "unknown setting");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string(), path.parent_path());
}

std::string default_config_text() {
  const RunConfig c = default_config();
  const IntegratorConfig& ic = c.integrator;
  std::ostringstream o;
  std::string strategies;
  for (std::size_t i = 0; i < c.sweep.strategies.size(); ++i)
    strategies += (i ? ", " : "") + c.sweep.strategies[i].label;

  o << "# Defaults for every setting. Paths are relative to this file.\n\n"
    << "[problem]\n"
    << "# dahlquist | linear | smooth | random-nonlinear | allen-cahn; other keys are problem parameters\n"
    << "name = " << c.problem << "\n\n"
    << "[tableau]\n"
    << "# empty: the shipped four-stage tableau\n"
    << "path =\n\n"
    << "[integrator]\n"
    << "rtol = " << format_double(ic.rtol) << "\n"
    << "atol = " << format_double(ic.atol) << "\n"
    << "# fixed | adaptive | adaptive-match-tol | full-space\n"
    << "strategy = " << to_string(ic.strategy) << "\n"
    << "M = " << ic.fixed_M << "\n"
    << "resid_tol = " << format_double(ic.resid_tol) << "\n"
    << "extend = " << (ic.extend ? "true" : "false") << "\n"
    << "h_init = " << format_double(ic.h_init) << "\n"
    << "h_min = " << format_double(ic.h_min) << "\n"
    << "h_max = " << format_double(ic.h_max) << "\n"
    << "safety = " << format_double(ic.safety) << "\n"
    << "fac_min = " << format_double(ic.fac_min) << "\n"
    << "fac_max = " << format_double(ic.fac_max) << "\n"
    << "M_max = " << ic.M_max << "\n"
    << "test_indices = " << join(ic.test_indices) << "\n"
    << "max_steps = " << ic.max_steps << "\n"
    << "trace = " << (ic.record_trace ? "true" : "false") << "\n\n"
    << "[sweep]\n"
    << "tolerances = " << join(c.sweep.tolerances) << "\n"
    << "atol_scale = " << format_double(c.sweep.atol_scale) << "\n"
    << "strategies = " << strategies << "\n"
    << "# empty: compute the reference before sweeping\n"
    << "reference =\n"
    << "record_timing = " << (c.sweep.record_timing ? "true" : "false") << "\n"
    << "workers = " << c.sweep.workers << "\n\n"
    << "[reference]\n"
    << "tol = " << format_double(c.reference.tol) << "\n"
    << "cross_check = " << (c.reference.cross_check ? "true" : "false") << "\n"
    << "cross_check_tol = " << format_double(c.reference.cross_check_tol) << "\n"
    << "agreement_tol = " << format_double(c.reference.agreement_tol) << "\n"
    << "max_oracle_steps = " << c.reference.max_oracle_steps << "\n\n"
    << "[stability]\n"
    << "h_lo = " << format_double(c.stability.h_lo) << "\n"
    << "h_hi = " << format_double(c.stability.h_hi) << "\n"
    << "points = " << c.stability.points << "\n"
    << "basis_sizes = " << join(c.stability.basis_sizes) << "\n"
    << "include_full = " << (c.stability.include_full ? "true" : "false") << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n"
    << "reference =\n";
  return o.str();
}

}  // namespace rok::app
