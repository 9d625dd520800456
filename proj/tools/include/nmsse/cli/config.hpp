#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsse/bell.hpp"
#include "nmsse/conditioning.hpp"
#include "nmsse/ensemble.hpp"
#include "nmsse/model.hpp"
#include "nmsse/propagator.hpp"

namespace nmsse::cli {

// Schema violation; `path()` names the offending field, e.g. "model.bath.modes[2].coupling".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct FlatBandSpec {
  double min = 0.0;
  double max = 0.0;
  double spacing = 1.0;
  double gamma = 1.0;
  bool cell_centred = false;
  friend bool operator==(const FlatBandSpec&, const FlatBandSpec&) = default;
};

struct BackendSpec {
  BathLayout layout = BathLayout::DenseFock;
  std::size_t n_max = 1;
  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

struct ObservableSpec {
  std::string name;
  CMatrix op;
};

struct EnsembleSpec {
  std::size_t n_traj = 1000;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::vector<double> checkpoints;
  std::vector<ObservableSpec> observables;
};

struct BellSpec {
  CMatrix hamiltonian;
  CVector initial_state;
  std::vector<CMatrix> projectors;
  std::vector<double> values;
  std::optional<std::size_t> null_index;
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t runs = 10000;
  std::uint64_t master_seed = 0;
  std::vector<double> checkpoints;
};

struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  std::string ensemble = "ensemble.json";
  std::string bell = "bell.json";
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  std::optional<SystemSpec> system;
  // Exactly one of `modes` or `flat_band` describes the bath.
  std::optional<std::vector<ModeSpec>> modes;
  std::optional<FlatBandSpec> flat_band;
  std::optional<BackendSpec> backend;
  std::optional<Unraveling> unraveling;
  std::optional<IntegratorConfig> integrator;
  std::optional<EnsembleSpec> ensemble;
  std::optional<BellSpec> bell;
  OutputSpec outputs;
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Strict parse: unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const nlohmann::ordered_json& tree);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json serialize_config(const RunConfig& config);

// Section checks with path diagnostics, run before any computation.
enum class Command { Simulate, Ensemble, Bell };
void require_sections(const RunConfig& config, Command command);

// Physics objects assembled from a validated config.
BathSpec build_bath(const RunConfig& config);
Model build_model(const RunConfig& config);
EnsembleConfig build_ensemble_config(const RunConfig& config);
Decomposition build_decomposition(const BellSpec& bell);

}  // namespace nmsse::cli
