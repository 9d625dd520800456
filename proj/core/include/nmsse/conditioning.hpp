#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/model.hpp"

namespace nmsse {

enum class Unraveling { Position, Quadrature, Coherent };

std::string_view to_string(Unraveling u);
Unraveling parse_unraveling(std::string_view name);

// Bath beables for each decomposition.
struct PositionVars {
  std::vector<double> x;  // per mode
};
struct QuadratureVars {
  std::vector<double> xplus;   // per pair
  std::vector<double> yminus;  // per pair
};
struct CoherentVars {
  std::vector<Complex> a;  // per mode, a_k = x+_k + i y-_k
};
using HiddenVars = std::variant<PositionVars, QuadratureVars, CoherentVars>;

Unraveling kind_of(const HiddenVars& hv);

// Canonical real coordinates: x_k | X+ by pair, then Y- by pair | Re a_k, then Im a_k.
std::vector<double> flatten(const HiddenVars& hv);
HiddenVars unflatten(Unraveling kind, const std::vector<double>& coords);
std::size_t coordinate_count(Unraveling kind, std::size_t modes);

// Conditioned system state <{q}|Psi>/sqrt(N) and its weight N (a density over hidden values).
struct ConditionedState {
  CVector ket;
  double weight = 0.0;
};

// Weights below this are treated as wavefunction nodes.
inline constexpr double kNodeFloor = 1e-300;

// Gauss-Legendre panel rule for the EPR overlap
//   W_mn(X, Y) = int dx'/sqrt(2 pi) e^{-iYx'} <(X-x')/sqrt2 | m> <(X+x')/sqrt2 | n>
// over |x'| <= sqrt(2(2 n_max + 1)) + 6.
class EprKernel {
 public:
  static constexpr std::size_t kNodesPerPanel = 8;

  explicit EprKernel(std::size_t n_max, std::size_t panels = 50);

  // Shared instance per (n_max, panels); thread-safe.
  static const EprKernel& shared(std::size_t n_max, std::size_t panels = 50);

  // out[m * (levels_pos + 1) + n] = W_mn for m <= levels_neg, n <= levels_pos.
  void overlap_table(double xplus, double yminus, std::size_t levels_neg, std::size_t levels_pos,
                     std::vector<Complex>& out) const;

  double cutoff() const noexcept { return cutoff_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  double cutoff_;
  double panel_width_;
  std::size_t panels_;
  std::vector<double> nodes_;
  std::vector<double> weights_;  // quadrature weight * e^{-x'^2/2} / sqrt(2 pi)
  std::vector<double> local_offsets_;
};

// W_00, W_01 and W_10 in closed form (one quantum at most in the pair):
// W_00 = e^{-(X^2+Y^2)/2} / sqrt(pi), W_01 = W_00 (X - iY), W_10 = W_00 (X + iY).
std::array<Complex, 3> epr_single_quantum(double xplus, double yminus);

// Unnormalized projections <{q}|Psi> onto the system space.
CVector bath_overlap_position(const StateVector& state, const PositionVars& hv);
CVector bath_overlap_quadrature(const StateVector& state, const QuadratureVars& hv,
                                const PairingMap& pairing);
CVector bath_overlap_coherent(const StateVector& state, const CoherentVars& hv);

ConditionedState condition_position(const StateVector& state, const PositionVars& hv);
ConditionedState condition_quadrature(const StateVector& state, const QuadratureVars& hv,
                                      const PairingMap& pairing);
// Weight includes the Husimi factor 1/pi^K.
ConditionedState condition_coherent(const StateVector& state, const CoherentVars& hv);

// Dispatch on the variant; `pairing` is required for quadrature variables.
CVector bath_overlap(const StateVector& state, const HiddenVars& hv, const PairingMap* pairing);
ConditionedState condition(const StateVector& state, const HiddenVars& hv, const PairingMap* pairing);

}  // namespace nmsse
