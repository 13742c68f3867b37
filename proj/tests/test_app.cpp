#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rok/app/commands.hpp"
#include "rok/app/config.hpp"
#include "rok/app/csv.hpp"
#include "rok/app/reference_file.hpp"
#include "rok/errors.hpp"

namespace fs = std::filesystem;
using namespace rok::app;
using rok::Vector;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("rok_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

RunConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, "cfg.ini", base);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const rok::ConfigError& e) {
    return e.what();
  }
  return {};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_SUITE("app") {
TEST_CASE("the printed defaults parse back to the defaults") {
  const RunConfig d = default_config();
  const RunConfig p = parse(default_config_text());
  CHECK(p.problem == d.problem);
  CHECK(p.integrator.rtol == d.integrator.rtol);
  CHECK(p.integrator.h_max == d.integrator.h_max);
  CHECK(p.integrator.test_indices == d.integrator.test_indices);
  CHECK(p.sweep.tolerances == d.sweep.tolerances);
  REQUIRE(p.sweep.strategies.size() == d.sweep.strategies.size());
  for (std::size_t i = 0; i < d.sweep.strategies.size(); ++i)
    CHECK(p.sweep.strategies[i].label == d.sweep.strategies[i].label);
  CHECK(p.stability.basis_sizes == d.stability.basis_sizes);
  CHECK(p.reference.max_oracle_steps == d.reference.max_oracle_steps);
  CHECK(d.sweep.tolerances.size() == 9);
}

TEST_CASE("config values and problem parameters") {
  const auto c = parse(R"(
; semicolon comment
[problem]
name = allen-cahn
nx = 16
alpha = 0.1

[integrator]
strategy = adaptive-match-tol
extend = true
h_max = 0.5
test_indices = 2, 4, 8

[sweep]
tolerances = 1e-3, 1e-4
strategies = M=8, R=1e-6+ext, full
workers = 3

[run]
seed = 17
)");
  CHECK(c.problem == "allen-cahn");
  CHECK(c.problem_params.get_int("nx", 0) == 16);
  CHECK(c.effective_problem_params().get_int("seed", 0) == 17);
  CHECK(c.integrator.strategy == rok::BasisStrategy::AdaptiveResidualMatchTol);
  CHECK(c.integrator.extend);
  CHECK(c.integrator.h_max == 0.5);
  CHECK(c.integrator.test_indices == std::vector<std::size_t>{2, 4, 8});
  CHECK(c.sweep.workers == 3);
  REQUIRE(c.sweep.strategies.size() == 3);
  CHECK(c.sweep.strategies[1].strategy == rok::BasisStrategy::AdaptiveResidual);
  CHECK(c.sweep.strategies[1].resid_tol == 1e-6);
  CHECK(c.sweep.strategies[1].extend);
  CHECK(c.sweep.strategies[2].strategy == rok::BasisStrategy::FullSpace);
}

TEST_CASE("config errors name the file, line and field") {
  auto e = error_of("[integrator]\n\nrtol = fast\n");
  CHECK(e.find("cfg.ini:3") != std::string::npos);
  CHECK(e.find("[integrator] rtol") != std::string::npos);

  e = error_of("[integrator]\nrtoll = 1e-3\n");
  CHECK(e.find("cfg.ini:2") != std::string::npos);
  CHECK(e.find("unknown setting") != std::string::npos);

  CHECK(error_of("[sweep]\nstrategies = M=4, Q=2\n").find("Q=2") != std::string::npos);
  CHECK(error_of("[sweep]\nworkers = 0\n").find("workers") != std::string::npos);
  CHECK(error_of("[integrator]\nM = -4\n").find("[integrator] M") != std::string::npos);
  CHECK(error_of("[integrator]\nextend = maybe\n").find("extend") != std::string::npos);
  CHECK(error_of("[tableau]\npath = missing.tab\n").find("[tableau] path") != std::string::npos);
  CHECK(error_of("[integrator]\nfac_min = 3\n").find("integrator") != std::string::npos);
  CHECK_FALSE(error_of("[oops\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/x.ini"), rok::ConfigError);
}

TEST_CASE("strategy labels") {
  auto s = StrategySpec::parse("M=16");
  CHECK(s.strategy == rok::BasisStrategy::Fixed);
  CHECK(s.M == 16);
  s = StrategySpec::parse("R=tol+ext");
  CHECK(s.strategy == rok::BasisStrategy::AdaptiveResidualMatchTol);
  CHECK(s.extend);
  CHECK(s.label == "R=tol+ext");
  rok::IntegratorConfig cfg;
  s.apply(cfg);
  CHECK(cfg.strategy == rok::BasisStrategy::AdaptiveResidualMatchTol);
  CHECK(cfg.extend);
  for (const char* bad : {"M=0", "M=x", "R=", "R=-1", "fixed", "M=4+ex"})
    CHECK_THROWS_AS(StrategySpec::parse(bad), rok::ConfigError);
}

TEST_CASE("CSV fields and shortest round-trip floats") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) {
    const double v = std::pow(10.0, u(rng)) * (i % 2 ? -1 : 1);
    const std::string s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-10) == "1e-10");
  CHECK(format_double(3.0) == "3");

  std::ostringstream out;
  CsvWriter w(out);
  w.header({"a", "b"});
  w.field("x,y").field(std::optional<double>{});
  w.end_row();
  w.field("say \"hi\"").field(true);
  w.end_row();
  CHECK(out.str() == "a,b\n\"x,y\",\n\"say \"\"hi\"\"\",true\n");
}

TEST_CASE("reference file round trip and corruption") {
  TempDir dir;
  ReferenceState st;
  st.y = Vector::LinSpaced(5, -1.0, 1.0);
  st.y(2) = 1.0 / 3.0;
  st.metadata = {{"problem", "smooth"}, {"rtol", "1e-12"}};
  write_reference(dir / "a.ref", st);
  const auto back = read_reference(dir / "a.ref");
  CHECK(back.y == st.y);
  CHECK(back.metadata == st.metadata);

  std::ifstream in(dir / "a.ref", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  CHECK(bytes.substr(0, 7) == "ROKREF1");
  CHECK(static_cast<unsigned char>(bytes[7]) == 5);  // little-endian N

  std::ofstream(dir / "bad.ref", std::ios::binary) << "ROKREF2" << bytes.substr(7);
  CHECK_THROWS_AS(read_reference(dir / "bad.ref"), rok::ConfigError);
  std::ofstream(dir / "short.ref", std::ios::binary) << bytes.substr(0, 20);
  CHECK_THROWS_AS(read_reference(dir / "short.ref"), rok::ConfigError);
  CHECK_THROWS_AS(read_reference(dir / "none.ref"), rok::ConfigError);
}

TEST_CASE("explicit oracle helpers") {
  const auto sm = rok::make_smooth_nonlinear();
  const Vector a = rk4_fixed(sm.problem, sm.y0, 0.0, 2.0, 1000);
  const Vector b = oracle::rk4(oracle::rhs_of(sm.problem), sm.y0, 0.0, 2.0, 1000);
  CHECK(a == b);
  const auto lin = rok::make_linear(rok::random_stable_matrix(12, 500.0, 4));
  const double rho = estimate_spectral_radius(lin.problem, lin.y0, 1, 400);
  CHECK(rho == doctest::Approx(oracle::eig_radius(lin.problem.dense_jacobian(lin.y0))).epsilon(0.05));
}

TEST_CASE("reference command") {
  RunConfig c = default_config();
  std::ostringstream out, err;
  TempDir dir;
  CommandOptions o;
  o.out = dir / "d.ref";
  REQUIRE(cmd_reference(c, o, out, err) == 0);
  const auto ref = read_reference(o.out);
  CHECK(std::abs(ref.y(0) - std::exp(-1.0)) < 1e-11);
  CHECK(ref.metadata.at("problem") == "dahlquist");
  CHECK(ref.metadata.at("rtol") == "1e-12");

  c.problem = "smooth";
  const auto inst = make_problem(c);
  const auto r = compute_reference(inst, load_tableau(c), c.integrator, c.reference, 1);
  CHECK(r.cross_checked);
  CHECK(r.oracle_difference < 1e-9);

  // a solution decayed far below 1 is compared on the mixed scale
  c.problem = "dahlquist";
  c.problem_params.set("lambda", "-50");
  const auto fast = compute_reference(make_problem(c), load_tableau(c), c.integrator, c.reference, 1);
  CHECK(fast.oracle_difference < 1e-9);
  CHECK(std::abs(fast.y(0) - std::exp(-50.0)) < 1e-12);

  Vector a(2), b(2);
  a << 1.0, 3.0;
  b << 0.0, 1.0;
  CHECK(mixed_difference(a, b) == doctest::Approx(std::sqrt((1.0 + 1.0) / 2.0)));
  CHECK(mixed_difference(b, b) == 0.0);

  // an unattainable cross-check tolerance aborts
  c.reference.cross_check_tol = 1e-30;
  std::ostringstream o2, e2;
  CHECK(cmd_reference(c, {}, o2, e2) != 0);
  CHECK(e2.str().find("cross-check") != std::string::npos);
}

TEST_CASE("run command") {
  RunConfig c = default_config();
  c.integrator.rtol = c.integrator.atol = 1e-8;
  std::ostringstream out, err;
  REQUIRE(cmd_run(c, {}, out, err) == 0);
  double e = 1;
  for (const auto& l : lines_of(out.str()))
    if (l.rfind("error_exact ", 0) == 0) e = std::stod(l.substr(12));
  CHECK(e <= 1e-6);
  CHECK(out.str().find("accepted ") != std::string::npos);

  c.integrator.h_min = 0.5;
  c.integrator.h_init = 0.6;
  c.problem = "linear";
  c.problem_params.set("stiffness", "1e6");
  std::ostringstream o2, e2;
  CHECK(cmd_run(c, {}, o2, e2) != 0);
  CHECK(o2.str().find("converged false") != std::string::npos);

  RunConfig bad = default_config();
  bad.tableau = "/nonexistent/x.tab";
  std::ostringstream o3, e3;
  CHECK_THROWS_AS(cmd_run(bad, {}, o3, e3), rok::ConfigError);
}

TEST_CASE("run with Allen-Cahn alpha = 0.1 at M = 4 converges") {
  RunConfig c = default_config();
  c.problem = "allen-cahn";
  c.problem_params.set("alpha", "0.1");
  c.integrator.rtol = c.integrator.atol = 1e-4;
  std::ostringstream out, err;
  CHECK(cmd_run(c, {}, out, err) == 0);
  CHECK(out.str().find("converged true") != std::string::npos);
}

TEST_CASE("sweep records, empty error on failure, ordering") {
  RunConfig c = default_config();
  c.problem = "linear";
  c.problem_params.set("n", "20");
  c.problem_params.set("stiffness", "1e4");
  c.sweep.tolerances = {1e-2, 1e-4, 1e-6};
  c.sweep.strategies = {StrategySpec::parse("M=2"), StrategySpec::parse("R=tol+ext")};
  c.integrator.max_steps = 40;  // forces some failures
  const auto inst = make_problem(c);
  const Vector ref = oracle::expm_apply(inst.problem.dense_jacobian(inst.y0), 1.0, inst.y0);
  const auto recs = run_sweep(c, load_tableau(c), ref, 2, false);
  REQUIRE(recs.size() == 6);
  bool some_failed = false;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].strategy == c.sweep.strategies[i / 3].label);
    CHECK(recs[i].tol == c.sweep.tolerances[i % 3]);
    CHECK(recs[i].error.has_value() == recs[i].converged);
    CHECK_FALSE(recs[i].wall_seconds.has_value());
    if (!recs[i].converged) {
      some_failed = true;
      CHECK(recs[i].accepted + recs[i].rejected > 0);
    }
  }
  CHECK(some_failed);

  std::ostringstream csv;
  write_sweep_csv(csv, recs);
  const auto ls = lines_of(csv.str());
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "problem,strategy,tol,error,accepted,rejected,rhs_evals,jvp_evals,mean_basis,"
                 "extensions,wall_seconds,converged");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split(ls[i]);
    REQUIRE(f.size() == 12);
    CHECK(f[3].empty() == (f[11] == "false"));
  }
}

TEST_CASE("sweep error decreases with tolerance for fixed M") {
  RunConfig c = default_config();
  c.problem = "random-nonlinear";
  c.problem_params.set("n", "20");
  c.sweep.tolerances = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  c.sweep.strategies = {StrategySpec::parse("M=4"), StrategySpec::parse("M=8")};
  const auto inst = make_problem(c);
  const auto tab = load_tableau(c);
  const auto ref = compute_reference(inst, tab, c.integrator, c.reference, 1).y;
  const auto recs = run_sweep(c, tab, ref, 1, true);
  for (std::size_t s = 0; s < 2; ++s) {
    int inversions = 0;
    for (std::size_t i = 1; i < 7; ++i) {
      const auto& a = recs[s * 7 + i - 1];
      const auto& b = recs[s * 7 + i];
      REQUIRE(a.converged);
      REQUIRE(b.converged);
      if (*b.error > *a.error) ++inversions;
      CHECK(b.wall_seconds.has_value());
    }
    CHECK(inversions <= 1);
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  RunConfig c = default_config();
  c.problem = "random-nonlinear";
  c.sweep.tolerances = {1e-3, 1e-5};
  const auto inst = make_problem(c);
  const Vector ref = Vector::Ones(static_cast<Eigen::Index>(inst.problem.dim()));
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(c, load_tableau(c), ref, 1, false));
  write_sweep_csv(b, run_sweep(c, load_tableau(c), ref, 4, false));
  CHECK(a.str() == b.str());
}

TEST_CASE("stability command rows") {
  RunConfig c = default_config();
  c.problem = "linear";
  c.problem_params.set("n", "8");
  c.stability.h_lo = 1e-9;
  c.stability.h_hi = 1.0;
  c.stability.points = 10;
  c.stability.basis_sizes = {1, 2, 4};
  const auto inst = make_problem(c);
  const auto reports = stability_sweep(inst, load_tableau(c), c.stability);
  REQUIRE(reports.size() == 40);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& full = reports[30 + i];
    CHECK(full.basis_size == 8);
    CHECK(full.rho_classic == full.rho_effective);
    for (std::size_t m = 0; m < 3; ++m) CHECK(reports[m * 10 + i].rho_classic == full.rho_classic);
  }
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(reports[m * 10].rho_classic == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(reports[m * 10].rho_effective == doctest::Approx(1.0).epsilon(1e-6));
  }

  std::ostringstream out, err;
  CHECK(cmd_stability(c, {}, out, err) == 0);
  const auto ls = lines_of(out.str());
  CHECK(ls[0] == "h,rho_classic,rho_effective,M");
  CHECK(ls.size() == 41);
}

TEST_CASE("defaults command") {
  std::ostringstream out;
  CHECK(cmd_defaults(out) == 0);
  CHECK(out.str() == default_config_text());
}
}
