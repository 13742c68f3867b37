#include <CLI11.hpp>

#include <iostream>

#include "rok/app/commands.hpp"
#include "rok/errors.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::size_t workers = 0;
  std::int64_t seed = -1;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "configuration file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output path");
  sub->add_option("--workers", c.workers, "parallel sweep cells")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "seed for randomized problems and estimators")
      ->check(CLI::NonNegativeNumber);
}

rok::app::RunConfig resolve(const Common& c) {
  auto cfg = c.config.empty() ? rok::app::default_config() : rok::app::load_config(c.config);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  return cfg;
}

rok::app::CommandOptions options(const Common& c) {
  rok::app::CommandOptions o;
  o.out = c.out;
  if (c.workers > 0) o.workers = c.workers;
  o.timing = c.timing;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rosenbrock-Krylov integrator with adaptive Krylov bases"};
  app.require_subcommand(1);

  Common common;
  auto* run = app.add_subcommand("run", "integrate once and print a summary");
  auto* sweep = app.add_subcommand("sweep", "work-precision sweep to CSV");
  auto* reference = app.add_subcommand("reference", "compute and store a reference solution");
  auto* stability = app.add_subcommand("stability", "transfer-matrix spectral radii to CSV");
  auto* defaults = app.add_subcommand("defaults", "print the default configuration");
  for (auto* sub : {run, sweep, reference, stability}) add_common(sub, common);
  sweep->add_flag("--timing", common.timing, "fill the wall_seconds column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (defaults->parsed()) return rok::app::cmd_defaults(std::cout);
    const auto cfg = resolve(common);
    const auto opts = options(common);
    if (run->parsed()) return rok::app::cmd_run(cfg, opts, std::cout, std::cerr);
    if (sweep->parsed()) return rok::app::cmd_sweep(cfg, opts, std::cout, std::cerr);
    if (reference->parsed()) return rok::app::cmd_reference(cfg, opts, std::cout, std::cerr);
    if (stability->parsed()) return rok::app::cmd_stability(cfg, opts, std::cout, std::cerr);
  } catch (const rok::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
