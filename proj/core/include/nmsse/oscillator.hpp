#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nmsse/basis.hpp"

namespace nmsse {

// <x|n> for x = (a + a^dagger)/sqrt(2): pi^{-1/4} H_n(x) e^{-x^2/2} / sqrt(2^n n!).
double fock_position_amplitude(std::size_t n, double x);

// <x|0> ... <x|n_max>, one recurrence pass.
void fock_position_amplitudes(double x, std::span<double> out);

// Same recurrence with the Gaussian factor left out: out[n] = <x|n> e^{x^2/2}.
void hermite_function_polynomials(double x, std::span<double> out);

struct CoherentOverlap {
  // amplitudes[n] = <n|a> = e^{-|a|^2/2} a^n / sqrt(n!).
  std::vector<Complex> amplitudes;
  // Upper bound on 1 - sum_n |amplitudes[n]|^2.
  double tail_bound = 0.0;
};

CoherentOverlap coherent_overlap_vector(Complex a, std::size_t n_max);

}  // namespace nmsse
