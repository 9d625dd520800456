#include "nmsse/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nmsse/error.hpp"
#include "nmsse/lindblad.hpp"
#include "nmsse/rng.hpp"
#include "nmsse/unraveling.hpp"

namespace nmsse {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace reference {

namespace {

CMatrix sigma_minus() {
  CMatrix l = CMatrix::Zero(2, 2);
  l(1, 0) = 1.0;
  return l;
}

CVector ket(std::initializer_list<Complex> values) {
  CVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const auto& c : values) v(i++) = c;
  return v;
}

}  // namespace

Model standard_model() {
  SystemSpec sys{CMatrix::Zero(2, 2), sigma_minus(), ket({1.0, 1.0}) / std::numbers::sqrt2};
  BathSpec bath{{{1.0, 0.4}, {-1.0, 0.4}}};
  return Model(sys, bath, BasisDescriptor::dense_fock(2, 2, 3));
}

IntegratorConfig standard_integrator(double t_final) { return IntegratorConfig{1e-3, t_final, 1}; }

Model markov_model(Unraveling kind) {
  std::vector<double> detunings;
  if (kind == Unraveling::Quadrature) {
    for (int j = -50; j < 50; ++j) detunings.push_back(0.2 * (j + 0.5));
  } else {
    for (int j = -50; j <= 50; ++j) detunings.push_back(0.2 * j);
  }
  SystemSpec sys{CMatrix::Zero(2, 2), sigma_minus(), ket({1.0, 0.0})};
  BathSpec bath = flat_band(detunings, 1.0);
  const auto basis = BasisDescriptor::single_excitation(2, bath.size());
  return Model(sys, std::move(bath), basis);
}

IntegratorConfig markov_integrator(double t_final) { return IntegratorConfig{0.01, t_final, 1}; }

Model vacuum_rabi_model(BathLayout layout) {
  SystemSpec sys{CMatrix::Zero(2, 2), sigma_minus(), ket({1.0, 0.0})};
  BathSpec bath{{{0.0, 1.0}}};
  const auto basis = layout == BathLayout::DenseFock ? BasisDescriptor::dense_fock(2, 1, 1)
                                                     : BasisDescriptor::single_excitation(2, 1);
  return Model(sys, bath, basis);
}

Model probe_model(std::uint64_t seed) {
  RngStream rng(seed, 0);
  const auto gauss = [&] { return Complex{normal(rng, 1.0), normal(rng, 1.0)}; };
  CMatrix a(2, 2);
  CMatrix l(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      a(i, j) = gauss();
      l(i, j) = gauss();
    }
  }
  const CMatrix h = 0.5 * (a + a.adjoint());
  CVector psi0(2);
  psi0 << gauss(), gauss();
  psi0.normalize();
  BathSpec bath;
  for (double omega : {0.7, 1.3}) {
    const double g = 0.2 + 0.8 * uniform(rng);
    bath.modes.push_back({omega, g});
    bath.modes.push_back({-omega, g});
  }
  return Model(SystemSpec{h, l, psi0}, bath, BasisDescriptor::dense_fock(2, 4, 2));
}

DiscreteGuide rabi_guide(double dt, double t_final) {
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 0.5;
  const HamiltonianFn fn = [h](double, const CVector& in, CVector& out) {
    out = h * in;
    return 0.0;
  };
  return DiscreteGuide(ket({1.0, 0.0}), fn, Decomposition::computational(2), dt, t_final);
}

}  // namespace reference

double velocity_oracle_deviation(Unraveling kind, std::size_t probes, std::uint64_t seed, bool corrupt_sign) {
  const Model model = reference::probe_model(seed);
  const PairingMap pairing = check_symmetric_pairs(model.bath);
  const PairingMap* pairs = kind == Unraveling::Quadrature ? &pairing : nullptr;
  const std::size_t coords = kind == Unraveling::Quadrature ? 2 * pairing.size()
                                                            : coordinate_count(kind, model.bath.size());
  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    RngStream rng(seed, p + 1);
    CVector amps(static_cast<Eigen::Index>(model.basis.dimension()));
    for (auto& c : amps) c = Complex{normal(rng, 1.0), normal(rng, 1.0)};
    amps.normalize();
    const double t = 5.0 * uniform(rng);
    const StateVector state(model.basis, amps, t);
    std::vector<double> q(coords);
    for (auto& x : q) x = normal(rng, 1.0);
    const HiddenVars hv = unflatten(kind, q);

    const ConditionedState cs = condition(state, hv, pairs);
    std::vector<double> closed =
        velocity_closed(kind, expectation(cs.ket, model.system.lowering), model.bath, pairs, t);
    if (corrupt_sign) {
      for (auto& v : closed) v = -v;
    }
    const std::vector<double> general = velocity_general(state, hv, t, model.bath, model.system, pairs);

    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < closed.size(); ++j) {
      diff = std::max(diff, std::abs(general[j] - closed[j]));
      scale = std::max(scale, std::abs(closed[j]));
    }
    worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
  }
  return worst;
}

double max_trace_distance(const EnsembleResult& result) {
  double worst = 0.0;
  for (const auto& c : result.checkpoints) worst = std::max(worst, c.trace_distance);
  return worst;
}

double max_equivariance_score(const EnsembleResult& result, bool means_only) {
  double worst = 0.0;
  const auto score = [](double sample, double ref, double se) {
    return se > 0.0 ? std::abs(sample - ref) / se : (sample == ref ? 0.0 : INFINITY);
  };
  for (const auto& c : result.checkpoints) {
    for (std::size_t j = 0; j < c.reference_mean.size(); ++j) {
      worst = std::max(worst, score(c.hidden_mean[j], c.reference_mean[j], c.hidden_mean_se[j]));
      if (!means_only) {
        worst = std::max(worst, score(c.hidden_variance[j], c.reference_variance[j], c.hidden_variance_se[j]));
      }
    }
  }
  return worst;
}

MarkovComparison markov_comparison(const EnsembleResult& result, const std::vector<double>& times) {
  MarkovComparison out;
  const Model model = reference::markov_model(result.unraveling);
  const LindbladConfig cfg{1e-3, times.empty() ? 0.0 : times.back(), 1};
  CMatrix excited = CMatrix::Zero(2, 2);
  excited(0, 0) = 1.0;
  const LindbladSeries oracle = lindblad_oracle(model.system, 1.0, cfg, {excited});
  for (const auto& c : result.checkpoints) {
    const auto it = std::find_if(times.begin(), times.end(), [&](double t) { return std::abs(t - c.time) < 1e-9; });
    if (it == times.end()) continue;
    const double t = c.time;
    const double estimate = c.estimate(0, 0).real();
    const auto idx = static_cast<std::size_t>(std::llround(t / cfg.dt));
    out.times.push_back(t);
    out.estimate.push_back(estimate);
    out.lindblad.push_back(oracle.observables.at(idx)[0]);
    out.analytic.push_back(std::exp(-t));
    out.exact.push_back(c.exact(0, 0).real());
    out.band_deviation = std::max(out.band_deviation, std::abs(out.exact.back() - std::exp(-t)));
    out.sampling_deviation = std::max(out.sampling_deviation, std::abs(estimate - out.exact.back()));
    out.max_deviation = std::max(out.max_deviation, std::abs(estimate - std::exp(-t)));
    out.oracle_deviation = std::max(out.oracle_deviation, std::abs(out.lindblad.back() - std::exp(-t)));
  }
  return out;
}

PropagatorChecks propagator_checks() {
  PropagatorChecks out;

  const Model rabi = reference::vacuum_rabi_model(BathLayout::DenseFock);
  const UniverseHamiltonian h(rabi.system, rabi.bath, rabi.basis);
  const IntegratorConfig fine{1e-3, 3.0, 1};
  const GuidingStateGrid grid = evolve(rabi.initial_state(), h.as_function(), fine);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    const double pe = partial_trace_bath(grid.at_index(i)).entries()(0, 0).real();
    out.rabi_error = std::max(out.rabi_error, std::abs(pe - std::cos(t) * std::cos(t)));
    if (i > 0) out.norm_drift_rate = std::max(out.norm_drift_rate, grid.norm_drift()[i] / t);
  }

  // |e,0> -> cos t |e,0> + sin t |g,1>
  const auto amplitude_error = [&](double dt) {
    const double t_end = 2.0;
    const GuidingStateGrid g = evolve(rabi.initial_state(), h.as_function(), IntegratorConfig{dt, t_end, 1});
    const StateVector& last = g.at_index(g.size() - 1);
    CVector exact = CVector::Zero(last.amplitudes.size());
    exact(static_cast<Eigen::Index>(rabi.basis.index(0, 0))) = std::cos(t_end);
    exact(static_cast<Eigen::Index>(rabi.basis.index(1, 1))) = std::sin(t_end);
    return (last.amplitudes - exact).norm();
  };
  out.halving_ratio = amplitude_error(0.1) / amplitude_error(0.05);

  SystemSpec sys{CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), CVector::Zero(2)};
  sys.h_int(0, 0) = 0.3;
  sys.h_int(1, 1) = -0.3;
  sys.lowering(1, 0) = 1.0;
  sys.initial_state(0) = 1.0;
  const BathSpec bath{{{-0.5, 0.3}, {0.0, 0.5}, {0.8, 0.2}}};
  const Model dense(sys, bath, BasisDescriptor::dense_fock(2, 3, 1));
  const Model single(sys, bath, BasisDescriptor::single_excitation(2, 3));
  const IntegratorConfig cfg{1e-3, 2.0, 100};
  const GuidingStateGrid gd = evolve(dense.initial_state(), UniverseHamiltonian(sys, bath, dense.basis).as_function(), cfg);
  const GuidingStateGrid gs = evolve(single.initial_state(), UniverseHamiltonian(sys, bath, single.basis).as_function(), cfg);
  for (std::size_t i = 0; i < gd.size(); ++i) {
    const StateVector lifted = embed(gs.at_index(i), dense.basis);
    out.layout_disagreement =
        std::max(out.layout_disagreement, (lifted.amplitudes - gd.at_index(i).amplitudes).cwiseAbs().maxCoeff());
  }
  return out;
}

BellChecks bell_checks(std::size_t runs, std::uint64_t seed) {
  BellChecks out;
  out.runs = runs;
  const DiscreteGuide guide = reference::rabi_guide(1e-3, std::numbers::pi);
  out.antisymmetric = true;
  out.min_rate = INFINITY;
  for (std::size_t i = 0; i < guide.size(); ++i) {
    const auto& j = guide.currents(i);
    const auto& t = guide.rates(i);
    const auto& p = guide.probabilities(i);
    for (Eigen::Index n = 0; n < j.rows(); ++n) {
      for (Eigen::Index m = 0; m < j.cols(); ++m) {
        if (j(n, m) != -j(m, n)) out.antisymmetric = false;
        out.min_rate = std::min(out.min_rate, t(n, m));
        const double rebuilt = t(n, m) * p[static_cast<std::size_t>(m)] - t(m, n) * p[static_cast<std::size_t>(n)];
        out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rebuilt - j(n, m)));
      }
    }
  }
  const std::vector<double> checkpoints{std::numbers::pi / 4.0, std::numbers::pi / 2.0, std::numbers::pi};
  const JumpStatistics stats = jump_statistics(guide, checkpoints, runs, seed);
  out.times = stats.times;
  for (std::size_t c = 0; c < stats.times.size(); ++c) {
    for (std::size_t n = 0; n < stats.exact[c].size(); ++n) {
      out.max_deviation = std::max(out.max_deviation, std::abs(stats.empirical[c][n] - stats.exact[c][n]));
    }
  }
  return out;
}

namespace {

std::string format(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult at_most(std::string name, double measured, double threshold, std::string detail = {}) {
  return CheckResult{std::move(name), measured, threshold, measured <= threshold, std::move(detail)};
}

CheckResult within(std::string name, double measured, double lo, double hi) {
  return CheckResult{std::move(name), measured, hi, measured >= lo && measured <= hi,
                     "accepted range [" + format(lo) + ", " + format(hi) + "]"};
}

}  // namespace

VerificationReport run_verification(const VerifyOptions& options) {
  if (options.suite != "quick" && options.suite != "full") {
    throw ModelError("unknown verification suite '" + options.suite + "' (expected quick or full)");
  }
  const bool full = options.suite == "full";
  VerificationReport report;
  report.suite = options.suite;
  auto& checks = report.checks;
  const Unraveling kinds[] = {Unraveling::Position, Unraveling::Quadrature, Unraveling::Coherent};

  const std::size_t probes = full ? 100 : 20;
  for (Unraveling kind : kinds) {
    const double dev = velocity_oracle_deviation(kind, probes, options.seed, options.corrupt_velocity_sign);
    checks.push_back(at_most("velocity_oracle/" + std::string(to_string(kind)), dev, 1e-8,
                             std::to_string(probes) + " random probes"));
  }

  const PropagatorChecks prop = propagator_checks();
  checks.push_back(at_most("propagator/vacuum_rabi", prop.rabi_error, 1e-8));
  checks.push_back(at_most("propagator/norm_drift_per_time", prop.norm_drift_rate, 1e-8));
  checks.push_back(within("propagator/rk4_halving_ratio", prop.halving_ratio, 12.0, 20.0));
  checks.push_back(at_most("propagator/layout_agreement", prop.layout_disagreement, 1e-6));

  {
    SystemSpec sys = reference::markov_model(Unraveling::Coherent).system;
    CMatrix excited = CMatrix::Zero(2, 2);
    excited(0, 0) = 1.0;
    const LindbladSeries s = lindblad_oracle(sys, 1.0, {1e-3, 3.0, 1}, {excited});
    double worst = 0.0;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      worst = std::max(worst, std::abs(s.observables[i][0] - std::exp(-s.times[i])));
    }
    checks.push_back(at_most("lindblad/amplitude_damping", worst, 1e-8));
  }

  const BellChecks bell = bell_checks(10000, options.seed);
  checks.push_back(at_most("bell/equivariance", bell.max_deviation, 0.02, "10000 runs at t = pi/4, pi/2, pi"));
  checks.push_back(CheckResult{"bell/antisymmetry", bell.antisymmetric ? 0.0 : 1.0, 0.0, bell.antisymmetric, "bitwise"});
  checks.push_back(CheckResult{"bell/rate_nonnegative", bell.min_rate, 0.0, bell.min_rate >= 0.0, "minimum rate"});
  checks.push_back(at_most("bell/current_reconstruction", bell.reconstruction_error, 1e-12));

  {
    const std::size_t m = full ? 2000 : 200;
    const double t_final = full ? 3.0 : 1.0;
    const std::vector<double> cps = full ? std::vector<double>{1.0, 2.0, 3.0} : std::vector<double>{0.5, 1.0};
    const Model model = reference::standard_model();
    const PairingMap pairing = check_symmetric_pairs(model.bath);
    const GuidingStateGrid grid = evolve(model.initial_state(),
                                         UniverseHamiltonian(model.system, model.bath, model.basis).as_function(),
                                         reference::standard_integrator(t_final));
    const double recon = std::max(0.05, 3.0 / std::sqrt(static_cast<double>(m)));
    std::vector<EnsembleResult> results;
    for (Unraveling kind : kinds) {
      EnsembleConfig cfg;
      cfg.n_traj = m;
      cfg.master_seed = options.seed;
      cfg.workers = options.workers;
      cfg.checkpoints = cps;
      results.push_back(run_ensemble(grid, model, kind, kind == Unraveling::Quadrature ? &pairing : nullptr, cfg));
      const EnsembleResult& r = results.back();
      const std::string tag(to_string(kind));
      checks.push_back(at_most("reconstruction/" + tag, max_trace_distance(r), recon,
                               "M = " + std::to_string(m)));
      checks.push_back(at_most("equivariance/" + tag, max_equivariance_score(r, kind == Unraveling::Coherent), 3.0,
                               "largest deviation in standard errors"));
      checks.push_back(at_most("node_failures/" + tag, r.failure_rate, kMaxFailureRate));
    }
    double cross = 0.0;
    for (std::size_t a = 0; a < results.size(); ++a) {
      for (std::size_t b = a + 1; b < results.size(); ++b) {
        for (std::size_t c = 0; c < cps.size(); ++c) {
          cross = std::max(cross, trace_distance(results[a].checkpoints[c].estimate, results[b].checkpoints[c].estimate));
        }
      }
    }
    checks.push_back(at_most("cross_unraveling", cross, 2.0 * recon));
  }

  {
    const std::size_t m = full ? 1000 : 100;
    const double t_final = full ? 3.0 : 1.0;
    std::vector<double> cps;
    for (int j = 1; 0.2 * j <= t_final + 1e-9; ++j) cps.push_back(0.2 * j);
    const double tol = std::max(0.05, 1.5 / std::sqrt(static_cast<double>(m)));
    std::vector<Unraveling> markov_kinds{Unraveling::Coherent};
    if (full) markov_kinds.insert(markov_kinds.begin(), Unraveling::Quadrature);
    for (Unraveling kind : markov_kinds) {
      const Model model = reference::markov_model(kind);
      const PairingMap pairing = kind == Unraveling::Quadrature ? check_symmetric_pairs(model.bath) : PairingMap{};
      const GuidingStateGrid grid = evolve(model.initial_state(),
                                           UniverseHamiltonian(model.system, model.bath, model.basis).as_function(),
                                           reference::markov_integrator(t_final));
      EnsembleConfig cfg;
      cfg.n_traj = m;
      cfg.master_seed = options.seed;
      cfg.workers = options.workers;
      cfg.checkpoints = cps;
      const EnsembleResult r =
          run_ensemble(grid, model, kind, kind == Unraveling::Quadrature ? &pairing : nullptr, cfg);
      const MarkovComparison cmp = markov_comparison(r, cps);
      const std::string tag(to_string(kind));
      checks.push_back(at_most("markov_limit/" + tag, cmp.max_deviation, tol,
                               "max |P_e - exp(-t)|, lindblad deviation " + format(cmp.oracle_deviation) +
                                   ", finite-band exact deviation " + format(cmp.band_deviation) +
                                   ", ensemble vs exact " + format(cmp.sampling_deviation)));
      checks.push_back(at_most("node_failures/markov_" + tag, r.failure_rate, kMaxFailureRate));
    }
  }
  return report;
}

}  // namespace nmsse
