#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/conditioning.hpp"
#include "nmsse/model.hpp"
#include "nmsse/propagator.hpp"
#include "nmsse/trajectory.hpp"

namespace nmsse {

struct NamedObservable {
  std::string name;
  CMatrix op;
};

struct EnsembleConfig {
  std::size_t n_traj = 1000;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::vector<double> checkpoints;
  std::vector<NamedObservable> observables;
  VelocityRoute route = VelocityRoute::Closed;
};

// Trajectory failures above this fraction mark the ensemble FAILED.
inline constexpr double kMaxFailureRate = 0.005;

struct ObservableEstimate {
  std::string name;
  double mean = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;
};

struct CheckpointSummary {
  double time = 0.0;
  CMatrix estimate;
  // Standard errors of the real and imaginary parts, entrywise.
  CMatrix standard_error;
  CMatrix exact;
  double trace_distance = 0.0;

  // Canonical hidden coordinates: sample statistics and their quantum reference.
  std::vector<double> hidden_mean;
  std::vector<double> hidden_mean_se;
  std::vector<double> hidden_variance;
  std::vector<double> hidden_variance_se;
  std::vector<double> reference_mean;
  std::vector<double> reference_variance;

  std::vector<ObservableEstimate> observables;
};

struct EnsembleResult {
  Unraveling unraveling = Unraveling::Position;
  std::size_t n_traj = 0;
  std::size_t completed = 0;
  std::size_t failures = 0;
  std::vector<std::uint64_t> failed_indices;
  std::vector<double> failure_times;
  double failure_rate = 0.0;
  bool failed = false;
  std::string diagnostics;
  std::vector<CheckpointSummary> checkpoints;
};

// Averages conditioned projectors over trajectories 0 .. n_traj-1 of the given
// master seed. Reduction runs in trajectory-index order, so the result does not
// depend on the worker count.
EnsembleResult run_ensemble(const GuidingStateGrid& grid, const Model& model, Unraveling kind,
                            const PairingMap* pairing, const EnsembleConfig& cfg);

// Half the sum of singular values of a - b.
double trace_distance(const CMatrix& a, const CMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace nmsse
