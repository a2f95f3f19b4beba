#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rmt/commands.hpp"
#include "rmt/config.hpp"
#include "rmt/manifest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Finite-rank deformations of Wigner matrices: simulate the "
               "rescaled outlier eigenvalues, sample their predicted limiting "
               "law, and compare the two."};
  app.set_version_flag("--version", rmt::cli::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();  // --seed / --threads may follow the subcommand name

  std::uint64_t seed = 0;
  int threads = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override the master seed from the config");
  CLI::Option* threads_opt = app.add_option(
      "--threads", threads,
      "Worker threads (0 = hardware concurrency); results never depend on this");

  std::string config_path, out_dir, sim_dir, ref_dir, suite, inject;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Sample deformed Wigner matrices and write "
                                     "the rescaled outlier observations");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* reference =
      app.add_subcommand("reference", "Sample the predicted limiting law and "
                                      "write its assembled tensors");
  reference->add_option("--config", config_path, "Experiment config (JSON)")->required();
  reference->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* compare =
      app.add_subcommand("compare", "Compare a simulation run against a "
                                    "reference run and write a report");
  compare->add_option("--sim", sim_dir, "Simulation output directory")->required();
  compare->add_option("--ref", ref_dir, "Reference output directory")->required();
  compare->add_option("--out", out_dir, "Report directory")->required();

  CLI::App* check =
      app.add_subcommand("check", "Run the internal consistency suites");
  check->add_option("--suite", suite, "Run a single named suite");
  check->add_option(
      "--inject", inject,
      "Inject a documented fault (flip-p-sign, drop-e-term, break-sort)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rmt::cli::kExitSuccess : rmt::cli::kExitUsage;
  }

  rmt::cli::CliOverrides overrides;
  if (seed_opt->count() > 0) overrides.seed = seed;
  if (threads_opt->count() > 0) overrides.threads = threads;

  try {
    if (simulate->parsed())
      return rmt::cli::cmd_simulate(config_path, out_dir, overrides, std::cout);
    if (reference->parsed())
      return rmt::cli::cmd_reference(config_path, out_dir, overrides, std::cout);
    if (compare->parsed())
      return rmt::cli::cmd_compare(sim_dir, ref_dir, out_dir, std::cout);
    return rmt::cli::cmd_check(suite, inject, std::cout);
  } catch (const rmt::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rmt::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rmt::cli::kExitFailure;
  }
}
