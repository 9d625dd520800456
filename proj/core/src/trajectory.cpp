#include "nmsse/trajectory.hpp"

#include <algorithm>

#include "nmsse/error.hpp"

namespace nmsse {

namespace {

class Drift {
 public:
  Drift(const Model& model, Unraveling kind, const PairingMap* pairing, VelocityRoute route)
      : model_(model), kind_(kind), pairing_(pairing), route_(route) {}

  std::vector<double> operator()(const StateVector& state, const std::vector<double>& coords) const {
    const HiddenVars hv = unflatten(kind_, coords);
    if (route_ == VelocityRoute::General) {
      return velocity_general(state, hv, state.time, model_.bath, model_.system, pairing_);
    }
    const ConditionedState cs = condition(state, hv, pairing_);
    return at(state.time, expectation(cs.ket, model_.system.lowering));
  }

  std::vector<double> at(double t, Complex lexp) const {
    return velocity_closed(kind_, lexp, model_.bath, pairing_, t);
  }

 private:
  const Model& model_;
  Unraveling kind_;
  const PairingMap* pairing_;
  VelocityRoute route_;
};

std::vector<double> shifted(const std::vector<double>& q, double h, const std::vector<double>& k) {
  std::vector<double> out(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) out[j] = q[j] + h * k[j];
  return out;
}

}  // namespace

Trajectory integrate_trajectory(const GuidingStateGrid& grid, const Model& model, Unraveling kind,
                                const PairingMap* pairing, std::uint64_t master_seed, std::uint64_t index,
                                const TrajectoryOptions& options) {
  if (!grid.has_half_steps()) {
    throw LatticeError("trajectory integration needs half-step guiding states (checkpoint_stride 1)");
  }
  if (grid.at_index(0).basis != model.basis) throw DimensionError("guiding state does not match the model basis");

  std::vector<std::size_t> snapshot_at;
  for (double t : options.snapshot_times) snapshot_at.push_back(grid.index_of(t));
  std::sort(snapshot_at.begin(), snapshot_at.end());

  Trajectory traj;
  traj.master_seed = master_seed;
  traj.index = index;

  HiddenVars start;
  if (options.initial) {
    start = *options.initial;
  } else {
    RngStream rng(master_seed, index);
    start = sample_initial(kind, model.bath, pairing, rng);
  }
  std::vector<double> q = flatten(start);

  const Drift drift(model, kind, pairing, options.route);
  const double h = grid.lattice_step();
  const std::size_t last = grid.size() - 1;
  auto next_snapshot = snapshot_at.begin();

  std::size_t i = 0;
  try {
    for (;; ++i) {
      const StateVector& here = grid.at_index(i);
      const double t = here.time;
      const HiddenVars hv = unflatten(kind, q);
      const ConditionedState cs = condition(here, hv, pairing);
      const Complex lexp = expectation(cs.ket, model.system.lowering);

      if (options.record_series) {
        traj.times.push_back(t);
        traj.hidden.push_back(hv);
        traj.noise.push_back(noise_z(hv, model.bath, t, pairing));
        traj.lexp.push_back(lexp);
        std::vector<double> obs;
        obs.reserve(options.observables.size());
        for (const auto& op : options.observables) obs.push_back(expectation(cs.ket, op).real());
        traj.observables.push_back(std::move(obs));
      }
      while (next_snapshot != snapshot_at.end() && *next_snapshot == i) {
        traj.snapshots.push_back(Snapshot{t, hv, cs});
        ++next_snapshot;
      }
      if (i == last) break;

      const StateVector& mid = grid.half_step(i);
      const StateVector& end = grid.at_index(i + 1);
      const std::vector<double> k1 =
          options.route == VelocityRoute::Closed ? drift.at(t, lexp) : drift(here, q);
      const std::vector<double> k2 = drift(mid, shifted(q, 0.5 * h, k1));
      const std::vector<double> k3 = drift(mid, shifted(q, 0.5 * h, k2));
      const std::vector<double> k4 = drift(end, shifted(q, h, k3));
      for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      }
    }
  } catch (const NodeEncountered&) {
    traj.status = TrajectoryStatus::NodeFailure;
    traj.failure_time = grid.time(i);
  }
  return traj;
}

}  // namespace nmsse
