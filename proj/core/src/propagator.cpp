#include "nmsse/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "nmsse/error.hpp"

namespace nmsse {

IntegrationFailure::IntegrationFailure(Reason reason, std::size_t step, double value)
    : Error([&] {
        const char* what = reason == Reason::NormDrift        ? "norm drift"
                           : reason == Reason::TruncationLoss ? "truncation loss"
                                                              : "jump probability per step";
        return std::string(what) + " limit exceeded at step " + std::to_string(step) +
               " (value " + std::to_string(value) + ")";
      }()),
      reason_(reason),
      step_(step),
      value_(value) {}

void IntegratorConfig::validate(double max_abs_detuning) const {
  if (!(dt > 0.0) || !(t_final > 0.0)) throw ModelError("dt and t_final must be positive");
  if (checkpoint_stride == 0) throw ModelError("checkpoint_stride must be positive");
  if (dt > 0.1 / std::max(1.0, max_abs_detuning) * (1.0 + 1e-12)) {
    throw ModelError("dt exceeds 0.1 / max(1, max|Omega_k|)");
  }
  const double ratio = t_final / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ModelError("t_final is not an integer multiple of dt");
  }
}

std::size_t IntegratorConfig::steps() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

double rk4_step(const HamiltonianFn& h, double t, double dt, const CVector& in, CVector& out) {
  const Complex minus_i{0.0, -1.0};
  CVector k1, k2, k3, k4, tmp;
  const double dropped = h(t, in, k1);
  k1 *= minus_i;
  tmp = in + (0.5 * dt) * k1;
  h(t + 0.5 * dt, tmp, k2);
  k2 *= minus_i;
  tmp = in + (0.5 * dt) * k2;
  h(t + 0.5 * dt, tmp, k3);
  k3 *= minus_i;
  tmp = in + dt * k3;
  h(t + dt, tmp, k4);
  k4 *= minus_i;
  out = in + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return dropped;
}

GuidingStateGrid::GuidingStateGrid(std::vector<StateVector> states, std::vector<StateVector> half_steps,
                                   double lattice_step, double truncation_loss,
                                   std::vector<double> norm_drift)
    : states_(std::move(states)),
      half_steps_(std::move(half_steps)),
      lattice_step_(lattice_step),
      truncation_loss_(truncation_loss),
      norm_drift_(std::move(norm_drift)) {
  if (states_.empty()) throw LatticeError("guiding-state grid is empty");
}

const StateVector& GuidingStateGrid::half_step(std::size_t i) const {
  if (half_steps_.empty()) {
    throw LatticeError("grid stores no half-step states; rebuild with checkpoint_stride 1 or an even stride");
  }
  return half_steps_.at(i);
}

std::size_t GuidingStateGrid::index_of(double t) const {
  const double pos = t / lattice_step_;
  const double nearest = std::round(pos);
  if (t < -1e-12 || std::abs(pos - nearest) > 1e-9 * std::max(1.0, pos) ||
      nearest > static_cast<double>(states_.size() - 1)) {
    throw LatticeError("time " + std::to_string(t) +
                       " is not on the guiding-state lattice; align the request with multiples of " +
                       std::to_string(lattice_step_));
  }
  return static_cast<std::size_t>(nearest);
}

const StateVector& GuidingStateGrid::state_at(double t) const { return states_[index_of(t)]; }

GuidingStateGrid evolve(const StateVector& initial, const HamiltonianFn& h, const IntegratorConfig& cfg,
                        double tolerance) {
  if (cfg.dt <= 0.0 || cfg.checkpoint_stride == 0) throw ModelError("invalid integrator configuration");
  const std::size_t steps = cfg.steps();
  const std::size_t stride = cfg.checkpoint_stride;
  if (steps % stride != 0) throw ModelError("checkpoint_stride must divide the step count");

  const double initial_norm = initial.amplitudes.norm();
  if (std::abs(initial_norm - 1.0) > tolerance) {
    throw IntegrationFailure(IntegrationFailure::Reason::NormDrift, 0, std::abs(initial_norm - 1.0));
  }

  std::vector<StateVector> states;
  std::vector<StateVector> halves;
  std::vector<double> drift;
  states.reserve(steps / stride + 1);
  states.emplace_back(initial.basis, initial.amplitudes, 0.0);
  drift.push_back(std::abs(initial_norm - 1.0));

  CVector current = initial.amplitudes;
  CVector next;
  double leaked = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    if (stride == 1) {
      CVector half;
      rk4_step(h, t, 0.5 * cfg.dt, current, half);
      halves.emplace_back(initial.basis, std::move(half), t + 0.5 * cfg.dt);
    } else if (stride % 2 == 0 && n % stride == stride / 2) {
      halves.emplace_back(initial.basis, current, t);
    }

    leaked += cfg.dt * rk4_step(h, t, cfg.dt, current, next);
    current.swap(next);

    const double loss = leaked * leaked;
    if (loss > tolerance) throw IntegrationFailure(IntegrationFailure::Reason::TruncationLoss, n + 1, loss);
    const double d = std::abs(current.norm() - 1.0);
    if (d > tolerance) throw IntegrationFailure(IntegrationFailure::Reason::NormDrift, n + 1, d);

    if ((n + 1) % stride == 0) {
      const double t_next = static_cast<double>(n + 1) * cfg.dt;
      states.emplace_back(initial.basis, current, t_next);
      drift.push_back(d);
    }
  }
  return GuidingStateGrid(std::move(states), std::move(halves), cfg.dt * static_cast<double>(stride),
                          leaked * leaked, std::move(drift));
}

DensityMatrix reduced_state(const GuidingStateGrid& grid, double t) {
  return partial_trace_bath(grid.state_at(t));
}

}  // namespace nmsse
