#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nmsse/conditioning.hpp"
#include "nmsse/model.hpp"
#include "nmsse/propagator.hpp"
#include "nmsse/unraveling.hpp"

namespace nmsse {

enum class VelocityRoute {
  Closed,   // closed-form drift from <L>
  General,  // commutator form at every stage
};

enum class TrajectoryStatus { Completed, NodeFailure };

struct Snapshot {
  double time = 0.0;
  HiddenVars hidden;
  ConditionedState conditioned;
};

struct TrajectoryOptions {
  VelocityRoute route = VelocityRoute::Closed;
  // Keep per-step hidden values, noise, <L> and observables.
  bool record_series = true;
  // System operators whose conditioned expectations are recorded per step.
  std::vector<CMatrix> observables;
  // Lattice times at which the conditioned state is stored.
  std::vector<double> snapshot_times;
  // Start from these hidden values instead of sampling.
  std::optional<HiddenVars> initial;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<HiddenVars> hidden;
  std::vector<NoiseSample> noise;
  std::vector<Complex> lexp;
  std::vector<std::vector<double>> observables;  // [step][observable]
  std::vector<Snapshot> snapshots;

  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  double failure_time = 0.0;
};

// Integrates d_t q = v(q, t) by RK4 on the guiding-state lattice. Stage states are
// the stored lattice and half-step states, so the grid must carry half steps.
Trajectory integrate_trajectory(const GuidingStateGrid& grid, const Model& model, Unraveling kind,
                                const PairingMap* pairing, std::uint64_t master_seed, std::uint64_t index,
                                const TrajectoryOptions& options = {});

}  // namespace nmsse
