#include "nmsse/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nmsse {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}
void normalized_recurrence(double x, double seed, std::span<double> out) {
  if (out.empty()) return;
  out[0] = seed;
  if (out.size() == 1) return;
  out[1] = std::numbers::sqrt2 * x * seed;
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double np1 = static_cast<double>(n + 1);
    out[n + 1] = std::sqrt(2.0 / np1) * x * out[n] - std::sqrt(static_cast<double>(n) / np1) * out[n - 1];
  }
}

}  // namespace

void fock_position_amplitudes(double x, std::span<double> out) {
  normalized_recurrence(x, kPiQuarter * std::exp(-0.5 * x * x), out);
}

void hermite_function_polynomials(double x, std::span<double> out) {
  normalized_recurrence(x, kPiQuarter, out);
}

double fock_position_amplitude(std::size_t n, double x) {
  std::vector<double> values(n + 1);
  fock_position_amplitudes(x, values);
  return values[n];
}

CoherentOverlap coherent_overlap_vector(Complex a, std::size_t n_max) {
  CoherentOverlap result;
  result.amplitudes.resize(n_max + 1);
  const double lambda = std::norm(a);
  Complex c{std::exp(-0.5 * lambda), 0.0};
  result.amplitudes[0] = c;
  double captured = std::norm(c);
  for (std::size_t n = 1; n <= n_max; ++n) {
    c *= a / std::sqrt(static_cast<double>(n));
    result.amplitudes[n] = c;
    captured += std::norm(c);
  }
  // Poisson tail: first omitted term times a geometric bound on the rest.
  const double next = std::norm(c) * lambda / static_cast<double>(n_max + 1);
  const double ratio = lambda / static_cast<double>(n_max + 2);
  result.tail_bound = ratio < 1.0 ? next / (1.0 - ratio) : std::max(0.0, 1.0 - captured);
  return result;
}

}  // namespace nmsse
