#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmsse/bell.hpp"
#include "nmsse/ensemble.hpp"
#include "nmsse/model.hpp"
#include "nmsse/propagator.hpp"

namespace nmsse {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

struct VerifyOptions {
  std::string suite = "quick";  // "quick" or "full"
  std::uint64_t seed = 20261018;
  std::size_t workers = 1;
  // Negative control: flips the sign of the closed-form drift.
  bool corrupt_velocity_sign = false;
};

VerificationReport run_verification(const VerifyOptions& options);

namespace reference {

// Two-level system, L = sigma_-, H_int = 0, modes Omega = +-1 with g = 0.4,
// DenseFock n_max = 3, start (|e> + |g>)/sqrt(2).
Model standard_model();
IntegratorConfig standard_integrator(double t_final = 3.0);

// Flat band with gamma = 1 and spacing 0.2 on [-10, 10], SingleExcitation, start |e>.
// Quadrature uses the 100 cell-centred detunings, Coherent the 101 node detunings.
Model markov_model(Unraveling kind);
IntegratorConfig markov_integrator(double t_final = 3.0);

// One resonant mode, g = 1, start |e, 0>: P_e(t) = cos^2 t.
Model vacuum_rabi_model(BathLayout layout);

// Random two-level model with paired modes (Omega = +-0.7, +-1.3) for oracle probes.
Model probe_model(std::uint64_t seed);

// H = sigma_x / 2 with the sigma_z eigenbasis, Phi(0) = |0>.
DiscreteGuide rabi_guide(double dt, double t_final);

}  // namespace reference

// Largest probe-wise relative deviation between the commutator-form and the
// closed-form drift over `probes` random (state, hidden values, t).
double velocity_oracle_deviation(Unraveling kind, std::size_t probes, std::uint64_t seed,
                                 bool corrupt_sign = false);

// Statistical comparisons on one ensemble result.
double max_trace_distance(const EnsembleResult& result);
// Largest |sample - reference| / standard error over coordinates and checkpoints.
// `means_only` skips the variance comparison.
double max_equivariance_score(const EnsembleResult& result, bool means_only);

struct MarkovComparison {
  std::vector<double> times;
  std::vector<double> estimate;  // excited population from the ensemble
  std::vector<double> lindblad;  // master-equation reference
  std::vector<double> analytic;  // e^{-t}
  std::vector<double> exact;     // finite-band population from the guiding state
  double max_deviation = 0.0;    // max |estimate - e^{-t}|
  double oracle_deviation = 0.0; // max |lindblad - e^{-t}|
  double band_deviation = 0.0;   // max |exact - e^{-t}|
  double sampling_deviation = 0.0; // max |estimate - exact|
};

MarkovComparison markov_comparison(const EnsembleResult& result, const std::vector<double>& times);

struct PropagatorChecks {
  double rabi_error = 0.0;          // max |P_e - cos^2 t| at dt = 1e-3
  double norm_drift_rate = 0.0;     // max norm drift per unit time
  double halving_ratio = 0.0;       // RK4 error(dt) / error(dt/2)
  double layout_disagreement = 0.0; // DenseFock vs SingleExcitation amplitudes
};

PropagatorChecks propagator_checks();

struct BellChecks {
  std::vector<double> times;
  double max_deviation = 0.0;       // |empirical - exact| over checkpoints and states
  bool antisymmetric = false;       // J_nm == -J_mn bitwise at every step
  double min_rate = 0.0;
  double reconstruction_error = 0.0;
  std::size_t runs = 0;
};

BellChecks bell_checks(std::size_t runs, std::uint64_t seed);

}  // namespace nmsse
