#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nmsse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitPhysics = 2,
  kExitVerification = 3,
};

struct SimulateArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;  // empty: ensemble.master_seed
  std::optional<std::string> output;
};

struct EnsembleArgs {
  std::string config;
  std::optional<std::string> output;
  std::optional<std::size_t> workers;
};

struct VerifyArgs {
  std::string suite = "quick";
  std::optional<std::string> report;
  std::size_t workers = 1;
  std::uint64_t seed = 20261018;
  bool corrupt_velocity_sign = false;
};

struct BellArgs {
  std::string config;
  std::optional<std::string> output;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_ensemble(const EnsembleArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_bell(const BellArgs& args, std::ostream& out, std::ostream& err);

// Path of the trajectory file for one of several seeds: "run.csv" -> "run_seed7.csv".
std::string seeded_path(const std::string& path, std::uint64_t seed);

}  // namespace nmsse::cli
