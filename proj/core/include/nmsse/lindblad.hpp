#pragma once

#include <cstddef>
#include <vector>

#include "nmsse/basis.hpp"
#include "nmsse/model.hpp"

namespace nmsse {

struct LindbladConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t stride = 1;  // store every stride-th step
};

struct LindbladSeries {
  std::vector<double> times;
  std::vector<CMatrix> rho;
  std::vector<std::vector<double>> observables;  // [time][observable]
};

// RK4 on d_t rho = -i[H, rho] + gamma (L rho L^dagger - {L^dagger L, rho}/2),
// starting from the system's initial pure state.
LindbladSeries lindblad_oracle(const SystemSpec& system, double gamma, const LindbladConfig& cfg,
                               const std::vector<CMatrix>& observables = {});

}  // namespace nmsse
