#include "nmsse/moments.hpp"

#include <numbers>
#include <utility>

#include "nmsse/error.hpp"

namespace nmsse {

namespace {

// <c>, <c^dagger c> and <c c> for a lowering combination c = sum_j alpha_j a_j.
struct LoweringMoments {
  Complex first;
  double number = 0.0;
  Complex second;
};

LoweringMoments lowering_moments(const StateVector& state, const std::vector<std::pair<std::size_t, double>>& terms) {
  const CVector& psi = state.amplitudes;
  const auto apply = [&](const CVector& in) {
    CVector out = CVector::Zero(in.size());
    std::span<const Complex> src(in.data(), static_cast<std::size_t>(in.size()));
    std::span<Complex> dst(out.data(), static_cast<std::size_t>(out.size()));
    for (const auto& [mode, alpha] : terms) {
      accumulate_bath_ladder(state.basis, mode, Ladder::Lower, Complex{alpha, 0.0}, src, dst);
    }
    return out;
  };
  const CVector phi = apply(psi);
  const CVector phi2 = apply(phi);
  return LoweringMoments{psi.dot(phi), phi.squaredNorm(), psi.dot(phi2)};
}

// Hermitian quadrature (c + c^dagger)/sqrt(2) for normalized c.
void quadrature_x(const LoweringMoments& m, double& mean, double& variance) {
  mean = std::numbers::sqrt2 * m.first.real();
  const double second = (2.0 * m.second.real() + 2.0 * m.number + 1.0) / 2.0;
  variance = second - mean * mean;
}

// Hermitian quadrature (c - c^dagger)/(i sqrt(2)).
void quadrature_y(const LoweringMoments& m, double& mean, double& variance) {
  mean = std::numbers::sqrt2 * m.first.imag();
  const double second = (-2.0 * m.second.real() + 2.0 * m.number + 1.0) / 2.0;
  variance = second - mean * mean;
}

}  // namespace

CoordinateMoments hidden_moments(const StateVector& state, Unraveling kind, const PairingMap* pairing) {
  const std::size_t modes = state.basis.mode_count();
  const double r = 1.0 / std::numbers::sqrt2;
  CoordinateMoments out;
  switch (kind) {
    case Unraveling::Position:
      out.mean.resize(modes);
      out.variance.resize(modes);
      for (std::size_t k = 0; k < modes; ++k) {
        quadrature_x(lowering_moments(state, {{k, 1.0}}), out.mean[k], out.variance[k]);
      }
      break;
    case Unraveling::Quadrature: {
      if (pairing == nullptr) throw ModelError("the quadrature unraveling needs a (k, -k) pairing map");
      const std::size_t pairs = pairing->size();
      out.mean.resize(2 * pairs);
      out.variance.resize(2 * pairs);
      for (std::size_t p = 0; p < pairs; ++p) {
        const auto [pos, neg] = pairing->pairs[p];
        quadrature_x(lowering_moments(state, {{pos, r}, {neg, r}}), out.mean[p], out.variance[p]);
        quadrature_y(lowering_moments(state, {{pos, r}, {neg, -r}}), out.mean[pairs + p], out.variance[pairs + p]);
      }
      break;
    }
    case Unraveling::Coherent:
      out.mean.resize(2 * modes);
      out.variance.resize(2 * modes);
      for (std::size_t k = 0; k < modes; ++k) {
        const LoweringMoments m = lowering_moments(state, {{k, 1.0}});
        const double re = m.first.real();
        const double im = m.first.imag();
        out.mean[k] = re;
        out.mean[modes + k] = im;
        out.variance[k] = (2.0 * m.second.real() + 2.0 * m.number + 2.0) / 4.0 - re * re;
        out.variance[modes + k] = (-2.0 * m.second.real() + 2.0 * m.number + 2.0) / 4.0 - im * im;
      }
      break;
  }
  return out;
}

}  // namespace nmsse
