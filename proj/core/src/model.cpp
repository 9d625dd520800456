#include "nmsse/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "nmsse/error.hpp"

namespace nmsse {

PairingError::PairingError(std::vector<double> offending)
    : Error([&] {
        std::ostringstream msg;
        msg << "bath modes cannot be paired symmetrically; offending detunings:";
        for (double d : offending) msg << ' ' << d;
        return msg.str();
      }()),
      detunings_(std::move(offending)) {}

void SystemSpec::validate(bool single_excitation) const {
  const auto n = h_int.rows();
  if (n == 0 || h_int.cols() != n) throw ModelError("h_int must be a nonempty square matrix");
  if (lowering.rows() != n || lowering.cols() != n) throw ModelError("lowering must match h_int shape");
  if (initial_state.size() != n) throw ModelError("initial system state must match h_int shape");
  if (!is_hermitian(h_int, 1e-12)) throw ModelError("h_int is not Hermitian");
  if (std::abs(initial_state.norm() - 1.0) > 1e-12) throw ModelError("initial system state is not normalized");
  if (single_excitation) {
    const CMatrix excitation = lowering.adjoint() * lowering;
    if ((lowering * lowering).cwiseAbs().maxCoeff() > 1e-12 ||
        (lowering * lowering.adjoint() * lowering - lowering).cwiseAbs().maxCoeff() > 1e-12 ||
        (h_int * excitation - excitation * h_int).cwiseAbs().maxCoeff() > 1e-12) {
      throw ModelError("single-excitation backend needs L strictly lowering with h_int conserving L^dagger L");
    }
  }
}

double BathSpec::max_abs_detuning() const noexcept {
  double m = 0.0;
  for (const auto& mode : modes) m = std::max(m, std::abs(mode.detuning));
  return m;
}

void BathSpec::validate() const {
  if (modes.empty()) throw ModelError("bath must contain at least one mode");
  for (const auto& mode : modes) {
    if (!(mode.coupling >= 0.0) || !std::isfinite(mode.coupling) || !std::isfinite(mode.detuning)) {
      throw ModelError("mode couplings must be finite and >= 0, detunings finite");
    }
  }
}

BathSpec flat_band(std::span<const double> detunings, double gamma) {
  if (detunings.size() < 2) throw ModelError("a band needs at least two modes");
  const double spacing = detunings[1] - detunings[0];
  if (!(spacing > 0.0)) throw ModelError("band detunings must increase");
  BathSpec bath;
  const double g = std::sqrt(gamma * spacing / (2.0 * std::numbers::pi));
  for (double d : detunings) bath.modes.push_back({d, g});
  return bath;
}

Model::Model(SystemSpec sys, BathSpec b, BasisDescriptor bas)
    : system(std::move(sys)), bath(std::move(b)), basis(std::move(bas)) {
  bath.validate();
  system.validate(basis.layout() == BathLayout::SingleExcitation);
  if (basis.system_dim() != system.dim() || basis.mode_count() != bath.size()) {
    throw DimensionError("basis does not match system dimension or mode count");
  }
}

StateVector Model::initial_state() const {
  return StateVector::product_vacuum(basis, system.initial_state, 0.0);
}

UniverseHamiltonian::UniverseHamiltonian(const SystemSpec& system, const BathSpec& bath,
                                         BasisDescriptor basis, Terms terms)
    : h_int_(system.h_int),
      lowering_(system.lowering),
      raising_(system.lowering.adjoint()),
      modes_(bath.modes),
      basis_(std::move(basis)),
      terms_(terms) {
  if (basis_.system_dim() != system.dim() || basis_.mode_count() != bath.size()) {
    throw DimensionError("basis does not match system dimension or mode count");
  }
}

double UniverseHamiltonian::apply(double t, const CVector& in, CVector& out) const {
  const auto dim = static_cast<Eigen::Index>(basis_.dimension());
  if (in.size() != dim) throw DimensionError("state does not match Hamiltonian basis");
  if (terms_ == Terms::Full) {
    out = apply_system_operator(basis_, h_int_, in);
  } else {
    out.setZero(dim);
  }
  const CVector l_in = apply_system_operator(basis_, lowering_, in);
  const CVector ldag_in = apply_system_operator(basis_, raising_, in);
  const std::span<const Complex> l_span(l_in.data(), basis_.dimension());
  const std::span<const Complex> ldag_span(ldag_in.data(), basis_.dimension());
  const std::span<Complex> out_span(out.data(), basis_.dimension());

  double dropped = 0.0;
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const double g = modes_[k].coupling;
    if (g == 0.0) continue;
    const Complex phase = std::polar(1.0, modes_[k].detuning * t);
    const Complex i{0.0, 1.0};
    dropped += std::sqrt(accumulate_bath_ladder(basis_, k, Ladder::Raise, i * g * phase, l_span, out_span));
    accumulate_bath_ladder(basis_, k, Ladder::Lower, -i * g * std::conj(phase), ldag_span, out_span);
  }
  return dropped;
}

StateVector UniverseHamiltonian::apply(double t, const StateVector& state) const {
  if (!(state.basis == basis_)) throw DimensionError("state basis differs from Hamiltonian basis");
  CVector out;
  apply(t, state.amplitudes, out);
  return StateVector(basis_, std::move(out), state.time);
}

HamiltonianFn UniverseHamiltonian::as_function() const {
  return [self = *this](double t, const CVector& in, CVector& out) { return self.apply(t, in, out); };
}

StateAction build_v_int(double t, const BathSpec& bath, const SystemSpec& system,
                        const BasisDescriptor& basis) {
  UniverseHamiltonian h(system, bath, basis, UniverseHamiltonian::Terms::CouplingOnly);
  return [h, t](const StateVector& s) { return h.apply(t, s); };
}

StateAction build_h_uni(double t, const BathSpec& bath, const SystemSpec& system,
                        const BasisDescriptor& basis) {
  UniverseHamiltonian h(system, bath, basis, UniverseHamiltonian::Terms::Full);
  return [h, t](const StateVector& s) { return h.apply(t, s); };
}

PairingMap check_symmetric_pairs(const BathSpec& bath, double tolerance) {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::vector<double> offending;
  for (std::size_t k = 0; k < bath.size(); ++k) {
    const double d = bath.modes[k].detuning;
    if (std::abs(d) <= tolerance) {
      offending.push_back(d);
    } else if (d > 0.0) {
      positive.push_back(k);
    } else {
      negative.push_back(k);
    }
  }
  auto by_magnitude = [&](std::size_t a, std::size_t b) {
    const double da = std::abs(bath.modes[a].detuning);
    const double db = std::abs(bath.modes[b].detuning);
    return da != db ? da < db : a < b;
  };
  std::sort(positive.begin(), positive.end(), by_magnitude);
  std::sort(negative.begin(), negative.end(), by_magnitude);

  // Each positive mode takes the first unused mirror within tolerance.
  PairingMap map;
  std::vector<bool> used(negative.size(), false);
  for (std::size_t p : positive) {
    const ModeSpec& mp = bath.modes[p];
    bool matched = false;
    for (std::size_t j = 0; j < negative.size(); ++j) {
      if (used[j]) continue;
      const ModeSpec& mn = bath.modes[negative[j]];
      if (std::abs(mp.detuning + mn.detuning) <= tolerance &&
          std::abs(mp.coupling - mn.coupling) <= tolerance) {
        used[j] = true;
        map.pairs.push_back({p, negative[j]});
        matched = true;
        break;
      }
    }
    if (!matched) offending.push_back(mp.detuning);
  }
  for (std::size_t j = 0; j < negative.size(); ++j) {
    if (!used[j]) offending.push_back(bath.modes[negative[j]].detuning);
  }
  if (!offending.empty()) throw PairingError(std::move(offending));
  return map;
}

}  // namespace nmsse
