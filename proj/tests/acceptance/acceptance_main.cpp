// Acceptance suite: one PASS/FAIL line per criterion, full-scale parameters.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nmsse/cli/commands.hpp"
#include "nmsse/cli/io.hpp"
#include "nmsse/verification.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nmsse;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 20261018;
const Unraveling kKinds[] = {Unraveling::Position, Unraveling::Quadrature, Unraveling::Coherent};

std::map<int, std::pair<bool, std::string>> g_lines;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  g_lines[id] = {pass, "criterion " + std::to_string(id) + " (" + title + "): " + detail};
  std::fprintf(stderr, "[done] criterion %d\n", id);
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

GuidingStateGrid guide(const Model& m, const IntegratorConfig& cfg) {
  return evolve(m.initial_state(), UniverseHamiltonian(m.system, m.bath, m.basis).as_function(), cfg);
}

struct FailureTally {
  std::size_t failures = 0;
  std::size_t runs = 0;
  double worst_rate = 0.0;
  void add(const EnsembleResult& r) {
    failures += r.failures;
    runs += r.n_traj;
    worst_rate = std::max(worst_rate, r.failure_rate);
  }
};

void criterion_velocity_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string per;
  for (Unraveling kind : kKinds) {
    const double d = velocity_oracle_deviation(kind, 100, kSeed);
    worst = std::max(worst, d);
    per += std::string(to_string(kind)) + " " + num(d) + "; ";
  }
  const double elapsed = seconds_since(start);
  report(1, "velocity-oracle equality", worst <= 1e-8 && elapsed < 10.0,
         per + "max " + num(worst) + " <= 1e-08, runtime " + num(elapsed) + " s < 10 s");
}

void criteria_standard_model(FailureTally& tally) {
  const auto start = Clock::now();
  const Model model = reference::standard_model();
  const PairingMap pairing = check_symmetric_pairs(model.bath);
  const GuidingStateGrid grid = guide(model, reference::standard_integrator(3.0));
  std::vector<EnsembleResult> results;
  for (Unraveling kind : kKinds) {
    EnsembleConfig cfg;
    cfg.n_traj = 2000;
    cfg.master_seed = kSeed;
    cfg.workers = worker_count();
    cfg.checkpoints = {1.0, 2.0, 3.0};
    results.push_back(run_ensemble(grid, model, kind, kind == Unraveling::Quadrature ? &pairing : nullptr, cfg));
    tally.add(results.back());
  }
  const double elapsed = seconds_since(start);

  double worst_td = 0.0;
  std::string td;
  for (const auto& r : results) {
    const double d = max_trace_distance(r);
    worst_td = std::max(worst_td, d);
    td += std::string(to_string(r.unraveling)) + " " + num(d) + "; ";
  }
  report(2, "fixed-time reconstruction", worst_td <= 0.05 && elapsed < 300.0,
         td + "max " + num(worst_td) + " <= 0.05 at t = 1, 2, 3 (M = 2000), runtime " + num(elapsed) + " s < 300 s on " +
             std::to_string(worker_count()) + " worker(s)");

  double worst_score = 0.0;
  std::string eq;
  for (const auto& r : results) {
    const double s = max_equivariance_score(r, r.unraveling == Unraveling::Coherent);
    worst_score = std::max(worst_score, s);
    eq += std::string(to_string(r.unraveling)) + " " + num(s) + " SE; ";
  }
  report(3, "equivariance transport", worst_score <= 3.0, eq + "max " + num(worst_score) + " <= 3 SE");

  double cross = 0.0;
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      for (std::size_t c = 0; c < results[a].checkpoints.size(); ++c) {
        cross = std::max(cross, trace_distance(results[a].checkpoints[c].estimate, results[b].checkpoints[c].estimate));
      }
    }
  }
  report(5, "cross-unraveling agreement", cross <= 0.10, "max pairwise trace distance " + num(cross) + " <= 0.1");
}

void criterion_markov(FailureTally& tally) {
  const auto start = Clock::now();
  std::vector<double> cps;
  for (int j = 1; j <= 15; ++j) cps.push_back(0.2 * j);
  double worst = 0.0, oracle = 0.0, band = 0.0, sampling = 0.0;
  std::string per;
  for (Unraveling kind : {Unraveling::Quadrature, Unraveling::Coherent}) {
    const Model model = reference::markov_model(kind);
    const PairingMap pairing = kind == Unraveling::Quadrature ? check_symmetric_pairs(model.bath) : PairingMap{};
    const GuidingStateGrid grid = guide(model, reference::markov_integrator(3.0));
    EnsembleConfig cfg;
    cfg.n_traj = 1000;
    cfg.master_seed = kSeed;
    cfg.workers = worker_count();
    cfg.checkpoints = cps;
    const EnsembleResult r = run_ensemble(grid, model, kind, kind == Unraveling::Quadrature ? &pairing : nullptr, cfg);
    tally.add(r);
    const MarkovComparison cmp = markov_comparison(r, cps);
    worst = std::max(worst, cmp.max_deviation);
    oracle = std::max(oracle, cmp.oracle_deviation);
    band = std::max(band, cmp.band_deviation);
    sampling = std::max(sampling, cmp.sampling_deviation);
    per += std::string(to_string(kind)) + " " + num(cmp.max_deviation) + "; ";
  }
  const double elapsed = seconds_since(start);
  report(4, "Markovian limit", worst <= 0.05 && oracle <= 0.05 && elapsed < 600.0,
         per + "max |P_e - exp(-t)| " + num(worst) + " <= 0.05 on t in [0.2, 3], lindblad oracle deviation " +
             num(oracle) + ", runtime " + num(elapsed) + " s < 600 s; exact finite-band P_e vs exp(-t) " + num(band) +
             ", ensemble vs exact finite-band P_e " + num(sampling));
}

void criterion_bell() {
  const BellChecks b = bell_checks(10000, kSeed);
  const bool pass = b.max_deviation <= 0.02 && b.antisymmetric && b.min_rate >= 0.0 && b.reconstruction_error <= 1e-12;
  report(6, "Bell jump equivariance", pass,
         "max |P_hat - P| " + num(b.max_deviation) + " <= 0.02 at t = pi/4, pi/2, pi (10^4 runs); antisymmetric " +
             (b.antisymmetric ? "bitwise" : "NO") + "; min rate " + num(b.min_rate) + " >= 0; reconstruction " +
             num(b.reconstruction_error) + " <= 1e-12");
}

void criterion_propagator() {
  const PropagatorChecks p = propagator_checks();
  const bool pass = p.rabi_error <= 1e-8 && p.norm_drift_rate <= 1e-8 && p.halving_ratio >= 12.0 &&
                    p.halving_ratio <= 20.0 && p.layout_disagreement <= 1e-6;
  report(7, "propagator validity", pass,
         "vacuum-Rabi error " + num(p.rabi_error) + " <= 1e-08; norm drift " + num(p.norm_drift_rate) +
             "/time <= 1e-08; halving ratio " + num(p.halving_ratio) + " in [12, 20]; layout disagreement " +
             num(p.layout_disagreement) + " <= 1e-06");
}

void criterion_determinism() {
  using nlohmann::ordered_json;
  const fs::path dir = fs::temp_directory_path() / ("nmsse_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path configs = NMSSE_CONFIG_DIR;
  std::ostringstream sink;
  bool same = true;
  std::string detail;
  for (const char* name : {"standard_position.json", "standard_quadrature.json", "standard_coherent.json"}) {
    ordered_json c = ordered_json::parse(cli::read_file((configs / name).string()));
    c["integrator"]["t_final"] = 1.0;
    c["ensemble"]["n_traj"] = 200;
    c["ensemble"]["checkpoints"] = ordered_json::array({0.5, 1.0});
    const std::string cfg = (dir / name).string();
    cli::write_file_atomic(cfg, c.dump(2));
    const auto out = [&](const std::string& tag) { return (dir / (tag + "_" + name)).string(); };
    int codes = 0;
    codes |= cli::cmd_ensemble({cfg, out("w1a"), 1}, sink, sink);
    codes |= cli::cmd_ensemble({cfg, out("w1b"), 1}, sink, sink);
    codes |= cli::cmd_ensemble({cfg, out("w8"), 8}, sink, sink);
    codes |= cli::cmd_simulate({cfg, {kSeed}, out("sa") + ".csv"}, sink, sink);
    codes |= cli::cmd_simulate({cfg, {kSeed}, out("sb") + ".csv"}, sink, sink);
    const std::string ref = cli::read_file(out("w1a"));
    const bool ok = codes == 0 && ref == cli::read_file(out("w1b")) && ref == cli::read_file(out("w8")) &&
                    cli::read_file(out("sa") + ".csv") == cli::read_file(out("sb") + ".csv");
    same = same && ok;
    detail += std::string(name) + (ok ? " identical; " : " DIFFERS; ");
  }
  {
    ordered_json c = ordered_json::parse(cli::read_file((configs / "bell_rabi.json").string()));
    c["bell"]["runs"] = 2000;
    const std::string cfg = (dir / "bell.json").string();
    cli::write_file_atomic(cfg, c.dump(2));
    int codes = 0;
    codes |= cli::cmd_bell({cfg, (dir / "bell_a.json").string()}, sink, sink);
    codes |= cli::cmd_bell({cfg, (dir / "bell_b.json").string()}, sink, sink);
    const bool ok = codes == 0 && cli::read_file((dir / "bell_a.json").string()) == cli::read_file((dir / "bell_b.json").string());
    same = same && ok;
    detail += std::string("bell ") + (ok ? "identical" : "DIFFERS");
  }
  fs::remove_all(dir);
  report(8, "determinism", same, "byte comparison across repeated runs and workers 1 vs 8: " + detail);
}

}  // namespace

int main() {
  FailureTally tally;
  criterion_velocity_oracle();
  criteria_standard_model(tally);
  criterion_markov(tally);
  criterion_bell();
  criterion_propagator();
  criterion_determinism();
  report(9, "node-failure rate", tally.worst_rate <= 0.005,
         std::to_string(tally.failures) + " failures in " + std::to_string(tally.runs) +
             " trajectories; worst ensemble rate " + num(tally.worst_rate) + " <= 0.005");
  int failed = 0;
  for (const auto& [id, line] : g_lines) {
    if (!line.first) ++failed;
    std::printf("%s %s\n", line.first ? "PASS" : "FAIL", line.second.c_str());
  }
  std::printf("%s: %d of %zu criteria failed\n", failed == 0 ? "ACCEPTED" : "REJECTED", failed, g_lines.size());
  return failed == 0 ? 0 : 1;
}
