#pragma once

#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/conditioning.hpp"
#include "nmsse/model.hpp"

namespace nmsse {

// Mean and variance of every canonical hidden coordinate under the distribution
// the unraveling assigns to |Psi>: the Born density of x_k or (X+, Y-) for
// Position and Quadrature, the Husimi density of a_k for Coherent.
struct CoordinateMoments {
  std::vector<double> mean;
  std::vector<double> variance;
};

CoordinateMoments hidden_moments(const StateVector& state, Unraveling kind, const PairingMap* pairing);

}  // namespace nmsse
