#pragma once

#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/conditioning.hpp"
#include "nmsse/model.hpp"
#include "nmsse/rng.hpp"

namespace nmsse {

struct NoiseSample {
  Complex z;
  double t = 0.0;
};

// Draws hidden values from the vacuum density: every canonical coordinate is
// Normal(0, 1/2), drawn in canonical order.
HiddenVars sample_initial(Unraveling kind, const BathSpec& bath, const PairingMap* pairing, RngStream& rng);

// Drift of every canonical coordinate given <L> from the conditioned state.
//   Position:   d x_k  = g_k (<L> e^{i Omega_k t} + c.c.) / sqrt(2)
//   Quadrature: d X+_k = g_k cos(Omega_k t) <L_x>,  d Y-_k = g_k sin(Omega_k t) <L_x>
//   Coherent:   d a_k  = g_k e^{i Omega_k t} <L>
std::vector<double> velocity_closed(Unraveling kind, Complex lexp, const BathSpec& bath,
                                    const PairingMap* pairing, double t);

// Drift from the commutator form v_j = Re[<psi_q| <q| -i[q_j, H_uni] |Psi>] / N, with
// the ladder algebra carried out in a basis two levels wider than `state`.
std::vector<double> velocity_general(const StateVector& state, const HiddenVars& hv, double t,
                                     const BathSpec& bath, const SystemSpec& system,
                                     const PairingMap* pairing);

// Noise function built from the hidden values:
//   Position:   z = sum_k g_k sqrt(2) x_k e^{-i Omega_k t}
//   Quadrature: z = sum_pairs 2 g_k (X+_k cos(Omega_k t) + Y-_k sin(Omega_k t))
//   Coherent:   z = sum_k g_k a_k e^{-i Omega_k t}
NoiseSample noise_z(const HiddenVars& hv, const BathSpec& bath, double t, const PairingMap* pairing);

// <psi|op|psi> for a normalized system ket.
Complex expectation(const CVector& ket, const CMatrix& op);

}  // namespace nmsse
