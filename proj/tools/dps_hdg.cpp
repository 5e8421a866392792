#include "dpshdg/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitThreshold = 2;
constexpr int kExitSolver = 3;

void print_conservation(const dpshdg::ConservationReport& r) {
  std::cout << "conservation: div_stokes=" << r.div_stokes << " fracture_balance=" << r.fracture_balance
            << " matrix_balance=" << r.matrix_balance << " jump_u=" << r.jump_u
            << " interface_flux=" << r.interface_flux << " jump_u_m=" << r.jump_u_m << '\n';
}

int report(const std::vector<std::string>& failures) {
  for (const auto& f : failures) {
    std::cerr << "FAIL: " << f << '\n';
  }
  return failures.empty() ? 0 : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for coupled dual-porosity/Stokes flow"};
  app.set_version_flag("--version", std::string(dpshdg::version()) + " (" + std::string(dpshdg::git_revision()) + ")");

  std::string scenario_name;
  std::string config_file;
  std::optional<int> k, levels, n;
  std::optional<double> beta, sigma, mu, kappa_f, kappa_m, alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool condense = false;
  bool no_fields = false;

  app.add_option("scenario", scenario_name, "mms, wellbore-vertical, wellbore-horizontal or random-perm")
      ->required();
  app.add_option("--config", config_file, "TOML-style key = value file")->check(CLI::ExistingFile);
  app.add_option("--k", k, "polynomial degree");
  app.add_option("--levels", levels, "number of mms refinement levels");
  app.add_option("--n", n, "grid intervals per unit length (mms: coarsest level)");
  app.add_option("--beta", beta, "interior penalty (default 10 k^2)");
  app.add_option("--sigma", sigma, "shape factor (wellbore presets 0.9, 0.5, 0.1)");
  app.add_option("--mu", mu, "viscosity");
  app.add_option("--kappa-f", kappa_f, "microfracture permeability");
  app.add_option("--kappa-m", kappa_m, "matrix permeability");
  app.add_option("--alpha", alpha, "slip coefficient");
  app.add_option("--seed", seed, "random-perm seed");
  app.add_option("--out", out, "output directory");
  app.add_flag("--condense", condense, "solve the statically condensed system");
  app.add_flag("--no-fields", no_fields, "skip the VTK/CSV field export");

  CLI11_PARSE(app, argc, argv);

  dpshdg::RunConfig config;
  try {
    const dpshdg::Scenario scenario = dpshdg::parse_scenario(scenario_name);
    config = dpshdg::RunConfig::defaults(scenario);
    if (!config_file.empty()) {
      dpshdg::apply_config_file(config, config_file);
    }
    if (k) config.k = *k;
    if (levels) config.levels = *levels;
    if (n) config.n = *n;
    if (beta) config.beta = *beta;
    if (sigma) config.sigma = *sigma;
    if (mu) config.mu = *mu;
    if (kappa_f) config.kappa_f = *kappa_f;
    if (kappa_m) config.kappa_m = *kappa_m;
    if (alpha) config.alpha = *alpha;
    if (seed) config.seed = *seed;
    if (out) config.out = *out;
    if (condense) config.condense = true;
    if (no_fields) config.write_fields = false;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (config.scenario == dpshdg::Scenario::Mms) {
      const dpshdg::MmsResult result = dpshdg::run_mms(config);
      std::cout << dpshdg::ErrorReport::csv_header() << '\n';
      for (const auto& l : result.levels) {
        std::cout << l.errors.csv_row() << '\n';
      }
      if (result.table) {
        dpshdg::stokes_table(*result.table).write_csv(std::cout);
        dpshdg::fracture_table(*result.table).write_csv(std::cout);
        dpshdg::matrix_table(*result.table).write_csv(std::cout);
      }
      return report(result.failures);
    }
    const dpshdg::FlowResult result = config.scenario == dpshdg::Scenario::RandomPerm
                                          ? dpshdg::run_random_perm(config)
                                          : dpshdg::run_wellbore(config);
    std::cout << "cells=" << result.cells << " unknowns=" << result.global_unknowns
              << " residual=" << result.solve.relative_residual << " seconds=" << result.solve.seconds << '\n';
    std::cout << "mean |u|=" << result.mean_speed << " mean |u^m|=" << result.mean_matrix_speed << '\n';
    print_conservation(result.conservation);
    return report(result.failures);
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
