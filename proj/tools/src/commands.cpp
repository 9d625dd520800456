#include "nmsse/cli/commands.hpp"

#include <cmath>
#include <filesystem>

#include "nmsse/cli/config.hpp"
#include "nmsse/cli/io.hpp"
#include "nmsse/error.hpp"
#include "nmsse/trajectory.hpp"
#include "nmsse/verification.hpp"

namespace nmsse::cli {

namespace {

struct Prepared {
  RunConfig config;
  Model model;
  PairingMap pairing;
  EnsembleConfig ensemble;
};

void require_on_lattice(const std::vector<double>& times, const IntegratorConfig& integrator) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double pos = times[i] / integrator.dt;
    if (std::abs(pos - std::round(pos)) > 1e-9 * std::max(1.0, pos) || times[i] > integrator.t_final + 1e-12) {
      throw ConfigError("ensemble.checkpoints[" + std::to_string(i) + "]",
                        "time is not a multiple of integrator.dt within [0, t_final]");
    }
  }
}

// Everything that can reject a config happens here, before any computation.
Prepared prepare(const std::string& path, Command command) {
  RunConfig config = load_config(path);
  require_sections(config, command);
  Model model = build_model(config);
  PairingMap pairing;
  if (*config.unraveling == Unraveling::Quadrature) {
    try {
      pairing = check_symmetric_pairs(model.bath);
    } catch (const PairingError& e) {
      throw ConfigError("model.bath", e.what());
    }
  }
  EnsembleConfig ensemble = build_ensemble_config(config);
  require_on_lattice(ensemble.checkpoints, *config.integrator);
  return Prepared{std::move(config), std::move(model), std::move(pairing), std::move(ensemble)};
}

GuidingStateGrid guide(const Model& model, const IntegratorConfig& integrator) {
  const UniverseHamiltonian h(model.system, model.bath, model.basis);
  return evolve(model.initial_state(), h.as_function(), integrator);
}

int report_config_error(const std::exception& e, std::ostream& err) {
  err << "config error: " << e.what() << '\n';
  return kExitConfig;
}

int report_physics_error(const std::exception& e, std::ostream& err) {
  err << "physics validity failure: " << e.what() << '\n';
  return kExitPhysics;
}

}  // namespace

std::string seeded_path(const std::string& path, std::uint64_t seed) {
  const std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path() / (p.stem().string() + "_seed" + std::to_string(seed));
  out += p.extension();
  return out.string();
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  std::optional<Prepared> prep;
  try {
    prep.emplace(prepare(args.config, Command::Simulate));
  } catch (const ConfigError& e) {
    return report_config_error(e, err);
  } catch (const nmsse::Error& e) {
    return report_config_error(e, err);
  }

  const Unraveling kind = *prep->config.unraveling;
  const PairingMap* pairing = kind == Unraveling::Quadrature ? &prep->pairing : nullptr;
  std::vector<std::uint64_t> seeds = args.seeds;
  if (seeds.empty()) seeds.push_back(prep->ensemble.master_seed);
  const std::string base = args.output.value_or(prep->config.outputs.trajectory);

  TrajectoryOptions options;
  std::vector<std::string> names;
  for (const auto& o : prep->ensemble.observables) {
    options.observables.push_back(o.op);
    names.push_back(o.name);
  }

  int code = kExitOk;
  try {
    const GuidingStateGrid grid = guide(prep->model, *prep->config.integrator);
    for (std::uint64_t seed : seeds) {
      const Trajectory traj = integrate_trajectory(grid, prep->model, kind, pairing, seed, 0, options);
      const std::string path = seeds.size() == 1 ? base : seeded_path(base, seed);
      write_file_atomic(path, write_csv(trajectory_table(traj, names)));
      out << path << '\n';
      if (traj.status == TrajectoryStatus::NodeFailure) {
        err << "seed " << seed << ": trajectory hit a wavefunction node at t = " << format_double(traj.failure_time)
            << " (partial series written)\n";
        code = kExitPhysics;
      }
    }
  } catch (const nmsse::Error& e) {
    return report_physics_error(e, err);
  }
  return code;
}

int cmd_ensemble(const EnsembleArgs& args, std::ostream& out, std::ostream& err) {
  std::optional<Prepared> prep;
  try {
    prep.emplace(prepare(args.config, Command::Ensemble));
  } catch (const ConfigError& e) {
    return report_config_error(e, err);
  } catch (const nmsse::Error& e) {
    return report_config_error(e, err);
  }
  if (args.workers) prep->ensemble.workers = *args.workers;

  const Unraveling kind = *prep->config.unraveling;
  const PairingMap* pairing = kind == Unraveling::Quadrature ? &prep->pairing : nullptr;
  const std::string path = args.output.value_or(prep->config.outputs.ensemble);
  try {
    const GuidingStateGrid grid = guide(prep->model, *prep->config.integrator);
    const EnsembleResult result = run_ensemble(grid, prep->model, kind, pairing, prep->ensemble);
    const auto tree = ensemble_json(result, serialize_config(prep->config), grid.truncation_loss());
    write_file_atomic(path, tree.dump(2) + "\n");
    out << path << '\n';
    if (result.failed) {
      err << "ensemble FAILED: " << result.diagnostics << '\n';
      return kExitPhysics;
    }
  } catch (const nmsse::Error& e) {
    return report_physics_error(e, err);
  }
  return kExitOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  VerifyOptions options;
  options.suite = args.suite;
  options.workers = args.workers;
  options.seed = args.seed;
  options.corrupt_velocity_sign = args.corrupt_velocity_sign;
  if (options.suite != "quick" && options.suite != "full") {
    err << "unknown suite '" << options.suite << "' (expected quick or full)\n";
    return kExitConfig;
  }
  VerificationReport report;
  try {
    report = run_verification(options);
  } catch (const nmsse::Error& e) {
    return report_physics_error(e, err);
  }
  const std::string text = report_json(report).dump(2) + "\n";
  if (args.report) {
    write_file_atomic(*args.report, text);
  } else {
    out << text;
  }
  for (const auto& c : report.checks) {
    err << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured " << format_double(c.measured) << "  threshold "
        << format_double(c.threshold) << '\n';
  }
  return report.passed() ? kExitOk : kExitVerification;
}

int cmd_bell(const BellArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  Decomposition dec;
  try {
    config = load_config(args.config);
    require_sections(config, Command::Bell);
    dec = build_decomposition(*config.bell);
  } catch (const ConfigError& e) {
    return report_config_error(e, err);
  }

  const BellSpec& spec = *config.bell;
  const CMatrix h = spec.hamiltonian;
  const HamiltonianFn fn = [h](double, const CVector& in, CVector& o) {
    o = h * in;
    return 0.0;
  };
  const std::string path = args.output.value_or(config.outputs.bell);
  try {
    const DiscreteGuide g(spec.initial_state, fn, dec, spec.dt, spec.t_final);
    const JumpStatistics stats = jump_statistics(g, spec.checkpoints, spec.runs, spec.master_seed);
    write_file_atomic(path, bell_json(stats, dec, serialize_config(config)).dump(2) + "\n");
    out << path << '\n';
  } catch (const nmsse::Error& e) {
    return report_physics_error(e, err);
  } catch (const std::logic_error& e) {
    return report_physics_error(e, err);
  }
  return kExitOk;
}

}  // namespace nmsse::cli
