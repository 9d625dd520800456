#include "nmsse/lindblad.hpp"

#include <cmath>

#include "nmsse/error.hpp"

namespace nmsse {

LindbladSeries lindblad_oracle(const SystemSpec& system, double gamma, const LindbladConfig& cfg,
                               const std::vector<CMatrix>& observables) {
  system.validate();
  if (system.dim() > 8) throw DimensionError("the master-equation oracle is limited to system_dim <= 8");
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0) || cfg.stride == 0) {
    throw ModelError("invalid master-equation integrator configuration");
  }

  const CMatrix& h = system.h_int;
  const CMatrix& l = system.lowering;
  const CMatrix ldag = l.adjoint();
  const CMatrix ldl = ldag * l;
  const Complex minus_i{0.0, -1.0};
  const auto rhs = [&](const CMatrix& rho) -> CMatrix {
    return minus_i * (h * rho - rho * h) + gamma * (l * rho * ldag - 0.5 * (ldl * rho + rho * ldl));
  };

  LindbladSeries out;
  CMatrix rho = system.initial_state * system.initial_state.adjoint();
  const auto record = [&](double t) {
    out.times.push_back(t);
    out.rho.push_back(rho);
    std::vector<double> values;
    for (const auto& op : observables) values.push_back((rho * op).trace().real());
    out.observables.push_back(std::move(values));
  };

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
  record(0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    const CMatrix k1 = rhs(rho);
    const CMatrix k2 = rhs(rho + 0.5 * cfg.dt * k1);
    const CMatrix k3 = rhs(rho + 0.5 * cfg.dt * k2);
    const CMatrix k4 = rhs(rho + cfg.dt * k3);
    rho += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((n + 1) % cfg.stride == 0) record(static_cast<double>(n + 1) * cfg.dt);
  }
  return out;
}

}  // namespace nmsse
