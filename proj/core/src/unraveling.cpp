#include "nmsse/unraveling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nmsse/error.hpp"

namespace nmsse {

namespace {

const PairingMap& require_pairing(const PairingMap* pairing) {
  if (pairing == nullptr) throw ModelError("the quadrature unraveling needs a (k, -k) pairing map");
  return *pairing;
}

struct LadderTerm {
  std::size_t mode;
  Ladder kind;
  Complex coef;
};
using BathOperator = std::vector<LadderTerm>;

// One bath operator per canonical coordinate.
std::vector<BathOperator> coordinate_operators(Unraveling kind, std::size_t modes, const PairingMap* pairing) {
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex half{0.5, 0.0};
  const Complex ihalf{0.0, 0.5};
  std::vector<BathOperator> ops;
  switch (kind) {
    case Unraveling::Position:
      for (std::size_t k = 0; k < modes; ++k) ops.push_back({{k, Ladder::Lower, r}, {k, Ladder::Raise, r}});
      break;
    case Unraveling::Quadrature: {
      const PairingMap& map = require_pairing(pairing);
      for (const auto& p : map.pairs) {
        ops.push_back({{p.positive, Ladder::Lower, half},
                       {p.positive, Ladder::Raise, half},
                       {p.negative, Ladder::Lower, half},
                       {p.negative, Ladder::Raise, half}});
      }
      for (const auto& p : map.pairs) {
        ops.push_back({{p.positive, Ladder::Lower, -ihalf},
                       {p.positive, Ladder::Raise, ihalf},
                       {p.negative, Ladder::Lower, ihalf},
                       {p.negative, Ladder::Raise, -ihalf}});
      }
      break;
    }
    case Unraveling::Coherent:
      for (std::size_t k = 0; k < modes; ++k) ops.push_back({{k, Ladder::Lower, half}, {k, Ladder::Raise, half}});
      for (std::size_t k = 0; k < modes; ++k) ops.push_back({{k, Ladder::Lower, -ihalf}, {k, Ladder::Raise, ihalf}});
      break;
  }
  return ops;
}

CVector apply_bath_operator(const BasisDescriptor& basis, const BathOperator& op, const CVector& in) {
  CVector out = CVector::Zero(in.size());
  std::span<const Complex> src(in.data(), static_cast<std::size_t>(in.size()));
  std::span<Complex> dst(out.data(), static_cast<std::size_t>(out.size()));
  for (const auto& term : op) accumulate_bath_ladder(basis, term.mode, term.kind, term.coef, src, dst);
  return out;
}

constexpr std::size_t kMaxWideDimension = std::size_t{1} << 22;

}  // namespace

HiddenVars sample_initial(Unraveling kind, const BathSpec& bath, const PairingMap* pairing, RngStream& rng) {
  const std::size_t count = kind == Unraveling::Quadrature ? 2 * require_pairing(pairing).size()
                                                           : coordinate_count(kind, bath.size());
  const double sigma = 1.0 / std::numbers::sqrt2;
  std::vector<double> coords(count);
  for (auto& c : coords) c = normal(rng, sigma);
  return unflatten(kind, coords);
}

std::vector<double> velocity_closed(Unraveling kind, Complex lexp, const BathSpec& bath,
                                    const PairingMap* pairing, double t) {
  const std::size_t modes = bath.size();
  std::vector<double> v;
  switch (kind) {
    case Unraveling::Position:
      v.resize(modes);
      for (std::size_t k = 0; k < modes; ++k) {
        const auto& m = bath.modes[k];
        const Complex phase = std::polar(1.0, m.detuning * t);
        v[k] = m.coupling * 2.0 * (lexp * phase).real() / std::numbers::sqrt2;
      }
      break;
    case Unraveling::Quadrature: {
      const PairingMap& map = require_pairing(pairing);
      const std::size_t pairs = map.size();
      const double lx = 2.0 * lexp.real();
      v.resize(2 * pairs);
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto& m = bath.modes[map.pairs[p].positive];
        v[p] = m.coupling * std::cos(m.detuning * t) * lx;
        v[pairs + p] = m.coupling * std::sin(m.detuning * t) * lx;
      }
      break;
    }
    case Unraveling::Coherent:
      v.resize(2 * modes);
      for (std::size_t k = 0; k < modes; ++k) {
        const auto& m = bath.modes[k];
        const Complex da = m.coupling * std::polar(1.0, m.detuning * t) * lexp;
        v[k] = da.real();
        v[modes + k] = da.imag();
      }
      break;
  }
  return v;
}

std::vector<double> velocity_general(const StateVector& state, const HiddenVars& hv, double t,
                                     const BathSpec& bath, const SystemSpec& system,
                                     const PairingMap* pairing) {
  const BasisDescriptor& basis = state.basis;
  if (basis.mode_count() != bath.size()) throw DimensionError("state and bath disagree on the mode count");
  const BasisDescriptor wide = basis.widened(2);
  if (wide.dimension() > kMaxWideDimension) {
    throw DimensionError("widened basis of dimension " + std::to_string(wide.dimension()) +
                         " is too large for the commutator-form velocity");
  }
  const StateVector psi = embed(state, wide);
  const UniverseHamiltonian h(system, bath, wide);
  CVector h_psi;
  h.apply(t, psi.amplitudes, h_psi);

  const CVector overlap = bath_overlap(psi, hv, pairing);
  const double weight = overlap.squaredNorm();
  if (!(weight > kNodeFloor)) throw NodeEncountered(weight);

  const auto ops = coordinate_operators(kind_of(hv), bath.size(), pairing);
  std::vector<double> v(ops.size());
  const Complex minus_i{0.0, -1.0};
  CVector h_q_psi;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    const CVector q_psi = apply_bath_operator(wide, ops[j], psi.amplitudes);
    const CVector q_h_psi = apply_bath_operator(wide, ops[j], h_psi);
    h.apply(t, q_psi, h_q_psi);
    const StateVector commutator(wide, minus_i * (q_h_psi - h_q_psi), t);
    const CVector projected = bath_overlap(commutator, hv, pairing);
    v[j] = overlap.dot(projected).real() / weight;
  }
  return v;
}

NoiseSample noise_z(const HiddenVars& hv, const BathSpec& bath, double t, const PairingMap* pairing) {
  Complex z{};
  switch (kind_of(hv)) {
    case Unraveling::Position: {
      const auto& x = std::get<PositionVars>(hv).x;
      for (std::size_t k = 0; k < bath.size(); ++k) {
        const auto& m = bath.modes[k];
        z += m.coupling * std::numbers::sqrt2 * x[k] * std::polar(1.0, -m.detuning * t);
      }
      break;
    }
    case Unraveling::Quadrature: {
      const auto& q = std::get<QuadratureVars>(hv);
      const PairingMap& map = require_pairing(pairing);
      double re = 0.0;
      for (std::size_t p = 0; p < map.size(); ++p) {
        const auto& m = bath.modes[map.pairs[p].positive];
        re += 2.0 * m.coupling * (q.xplus[p] * std::cos(m.detuning * t) + q.yminus[p] * std::sin(m.detuning * t));
      }
      z = Complex{re, 0.0};
      break;
    }
    case Unraveling::Coherent: {
      const auto& a = std::get<CoherentVars>(hv).a;
      for (std::size_t k = 0; k < bath.size(); ++k) {
        const auto& m = bath.modes[k];
        z += m.coupling * a[k] * std::polar(1.0, -m.detuning * t);
      }
      break;
    }
  }
  return NoiseSample{z, t};
}

Complex expectation(const CVector& ket, const CMatrix& op) {
  return ket.dot(op * ket);
}

}  // namespace nmsse
