#pragma once

#include <cstddef>
#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/model.hpp"

namespace nmsse {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t checkpoint_stride = 1;

  // dt <= 0.1 / max(1, max|Omega_k|), t_final / dt integral to 1e-9.
  void validate(double max_abs_detuning) const;
  std::size_t steps() const;
};

// One classical fourth-order Runge-Kutta step of d_t psi = -i H(t) psi.
// Returns the truncation bound reported by the first stage.
double rk4_step(const HamiltonianFn& h, double t, double dt, const CVector& in, CVector& out);

// Guiding state |Psi(t)> on a fixed lattice, immutable once built.
class GuidingStateGrid {
 public:
  GuidingStateGrid(std::vector<StateVector> states, std::vector<StateVector> half_steps,
                   double lattice_step, double truncation_loss, std::vector<double> norm_drift);

  std::size_t size() const noexcept { return states_.size(); }
  double lattice_step() const noexcept { return lattice_step_; }
  double t_final() const noexcept { return states_.back().time; }
  double time(std::size_t i) const { return states_.at(i).time; }

  const StateVector& at_index(std::size_t i) const { return states_.at(i); }
  // State at time(i) + lattice_step/2.
  const StateVector& half_step(std::size_t i) const;
  bool has_half_steps() const noexcept { return !half_steps_.empty(); }

  // Exact stored state; throws LatticeError off the lattice.
  const StateVector& state_at(double t) const;
  std::size_t index_of(double t) const;

  double truncation_loss() const noexcept { return truncation_loss_; }
  const std::vector<double>& norm_drift() const noexcept { return norm_drift_; }

 private:
  std::vector<StateVector> states_;
  std::vector<StateVector> half_steps_;
  double lattice_step_;
  double truncation_loss_;
  std::vector<double> norm_drift_;
};

// Fixed-step RK4 without renormalization. Throws IntegrationFailure at the first
// step whose norm drift or accumulated truncation loss exceeds `tolerance`.
GuidingStateGrid evolve(const StateVector& initial, const HamiltonianFn& h,
                        const IntegratorConfig& cfg, double tolerance = 1e-6);

DensityMatrix reduced_state(const GuidingStateGrid& grid, double t);

}  // namespace nmsse
