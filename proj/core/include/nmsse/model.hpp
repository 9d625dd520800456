#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nmsse/basis.hpp"

namespace nmsse {

// One bath oscillator in the interaction frame: Omega_k = omega_k - Omega, g_k >= 0.
struct ModeSpec {
  double detuning = 0.0;
  double coupling = 0.0;
};

struct SystemSpec {
  // Interaction-frame system Hamiltonian (time-independent).
  CMatrix h_int;
  // Coupling operator L.
  CMatrix lowering;
  CVector initial_state;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(h_int.rows()); }

  // Hermitian h_int, normalized initial state, matching shapes. With
  // `single_excitation`, L must lower a graded excitation number by one.
  void validate(bool single_excitation = false) const;
};

// Bath initial state is always the vacuum.
struct BathSpec {
  std::vector<ModeSpec> modes;

  std::size_t size() const noexcept { return modes.size(); }
  double max_abs_detuning() const noexcept;
  void validate() const;
};

// Modes spaced `spacing` apart with g_k = sqrt(gamma * spacing / 2 pi).
BathSpec flat_band(std::span<const double> detunings, double gamma);

struct Model {
  SystemSpec system;
  BathSpec bath;
  BasisDescriptor basis;

  Model(SystemSpec system, BathSpec bath, BasisDescriptor basis);
  StateVector initial_state() const;
};

// Time-dependent generator: writes H(t) in into `out` and returns a bound on the
// norm of amplitude dropped at the truncation edge.
using HamiltonianFn = std::function<double(double t, const CVector& in, CVector& out)>;

// H_uni(t) = H_int (x) 1 + V_int(t),
// V_int(t) = i sum_k g_k (L e^{i Omega_k t} a_k^dagger - L^dagger e^{-i Omega_k t} a_k).
class UniverseHamiltonian {
 public:
  enum class Terms { Full, CouplingOnly };

  UniverseHamiltonian(const SystemSpec& system, const BathSpec& bath, BasisDescriptor basis,
                      Terms terms = Terms::Full);

  double apply(double t, const CVector& in, CVector& out) const;
  StateVector apply(double t, const StateVector& state) const;

  HamiltonianFn as_function() const;
  const BasisDescriptor& basis() const noexcept { return basis_; }

 private:
  CMatrix h_int_;
  CMatrix lowering_;
  CMatrix raising_;
  std::vector<ModeSpec> modes_;
  BasisDescriptor basis_;
  Terms terms_;
};

// Fixed-time linear action |psi> -> op|psi>.
using StateAction = std::function<StateVector(const StateVector&)>;

StateAction build_v_int(double t, const BathSpec& bath, const SystemSpec& system,
                        const BasisDescriptor& basis);
StateAction build_h_uni(double t, const BathSpec& bath, const SystemSpec& system,
                        const BasisDescriptor& basis);

struct ModePair {
  std::size_t positive;  // Omega_k > 0
  std::size_t negative;  // Omega_{-k} = -Omega_k
};

struct PairingMap {
  std::vector<ModePair> pairs;  // sorted by |Omega|
  std::size_t size() const noexcept { return pairs.size(); }
};

// Matches every mode k with a mirror -k (Omega_{-k} = -Omega_k, g_{-k} = g_k)
// within `tolerance`. Zero-detuning modes are unpairable.
PairingMap check_symmetric_pairs(const BathSpec& bath, double tolerance = 1e-9);

}  // namespace nmsse
