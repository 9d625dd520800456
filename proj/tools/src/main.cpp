#include <iostream>

#include <CLI11.hpp>

#include "nmsse/cli/commands.hpp"
#include "nmsse/version.hpp"

int main(int argc, char** argv) {
  using namespace nmsse::cli;

  CLI::App app{"Non-Markovian modal trajectories: simulate, ensemble, verify, bell"};
  app.set_version_flag("--version", nmsse::kVersion);
  app.require_subcommand(1);

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Integrate single trajectories and write CSV");
  sim->add_option("config", simulate.config, "Run configuration (JSON)")->required();
  sim->add_option("--seed", simulate.seeds, "Master seed; repeat for several trajectories");
  sim->add_option("-o,--output", simulate.output, "Override outputs.trajectory");

  EnsembleArgs ensemble;
  auto* ens = app.add_subcommand("ensemble", "Run a trajectory ensemble and write the JSON result");
  ens->add_option("config", ensemble.config, "Run configuration (JSON)")->required();
  ens->add_option("-o,--output", ensemble.output, "Override outputs.ensemble");
  ens->add_option("--workers", ensemble.workers, "Override ensemble.workers")->check(CLI::PositiveNumber);

  VerifyArgs verify;
  auto* ver = app.add_subcommand("verify", "Run the invariant batteries on reference models");
  ver->add_option("suite", verify.suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ver->add_option("--report", verify.report, "Write the JSON report here instead of stdout");
  ver->add_option("--workers", verify.workers, "Worker threads for ensembles")->check(CLI::PositiveNumber);
  ver->add_option("--seed", verify.seed, "Master seed for the statistical checks");
  ver->add_flag("--corrupt-velocity-sign", verify.corrupt_velocity_sign, "Negative control for the velocity oracle");

  BellArgs bell;
  auto* bel = app.add_subcommand("bell", "Simulate the Bell jump process of a discrete model");
  bel->add_option("config", bell.config, "Run configuration with a 'bell' section (JSON)")->required();
  bel->add_option("-o,--output", bell.output, "Override outputs.bell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(simulate, std::cout, std::cerr);
    if (*ens) return cmd_ensemble(ensemble, std::cout, std::cerr);
    if (*ver) return cmd_verify(verify, std::cout, std::cerr);
    if (*bel) return cmd_bell(bell, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
