#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eulerstat/cli.hpp"

int main(int argc, char** argv) {
  using namespace eulerstat;
  CLI::App app{"Monte Carlo statistical solutions of 2D incompressible Euler"};
  app.require_subcommand(1);

  RunOptions run_opt;
  std::string config;
  auto* run = app.add_subcommand("run", "Run the ensembles described by a config file or preset");
  run->add_option("config", config, "Config file path or preset name")->required();
  run->add_flag("--force", run_opt.force, "Overwrite existing outputs");
  run->add_option("--workers", run_opt.workers, "Parallel sample workers")
      ->check(CLI::PositiveNumber);
  run->add_flag("--large", run_opt.large, "Lift the N <= 256, m <= 64 limits");

  DiagnoseOptions diag_opt;
  std::vector<std::string> files;
  bool structure = false, cauchy = false, mean_variance = false;
  std::optional<double> gamma, time_reg;
  std::optional<int> wasserstein;
  std::size_t tuples = 0;
  auto* diagnose = app.add_subcommand("diagnose", "Compute diagnostics from snapshot files");
  diagnose->add_option("files", files, "Snapshot files (.euss)")->required();
  diagnose->add_flag("--structure", structure, "Structure function and fitted exponent");
  diagnose->add_option("--spectrum", gamma, "Compensated energy spectrum K^gamma E(K)");
  diagnose->add_option("--wasserstein", wasserstein, "W1 between k-point marginals of consecutive files")
      ->check(CLI::Range(1, 3));
  diagnose->add_option("--tuples", tuples, "Number of x-tuples for --wasserstein");
  diagnose->add_flag("--cauchy", cauchy, "Cauchy rates between consecutive files (N, 2N)");
  diagnose->add_flag("--mean-variance", mean_variance, "Mean and variance fields");
  diagnose->add_option("--time-regularity", time_reg, "Time-regularity ratio in H^-L");
  diagnose->add_option("--out", diag_opt.out_dir, "Output directory");

  app.add_subcommand("presets", "List the built-in experiment configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (*run) {
    if (const char* seed = std::getenv("EULER_STAT_SEED")) run_opt.seed_override = seed;
    return cmd_run(config, run_opt, std::cout, std::cerr);
  }
  if (*diagnose) {
    auto& r = diag_opt.request;
    r.structure = structure;
    r.spectrum_gamma = gamma;
    r.wasserstein_k = wasserstein;
    r.wasserstein_tuples = tuples;
    r.cauchy = cauchy;
    r.mean_variance = mean_variance;
    r.time_regularity_L = time_reg;
    return cmd_diagnose(files, diag_opt, std::cout, std::cerr);
  }
  return cmd_presets(std::cout);
}
