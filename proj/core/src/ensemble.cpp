#include "nmsse/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "nmsse/error.hpp"
#include "nmsse/moments.hpp"

namespace nmsse {

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("trace distance of mismatched matrices");
  const Eigen::JacobiSVD<CMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.entries(), b.entries());
}

namespace {

// Sample mean, variance and their standard errors for one coordinate.
void coordinate_statistics(const std::vector<double>& xs, double& mean, double& mean_se, double& variance,
                           double& variance_se) {
  const double n = static_cast<double>(xs.size());
  mean = mean_se = variance = variance_se = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  variance = n > 1.0 ? m2 * n / (n - 1.0) : 0.0;
  mean_se = std::sqrt(variance / n);
  variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
}

}  // namespace

EnsembleResult run_ensemble(const GuidingStateGrid& grid, const Model& model, Unraveling kind,
                            const PairingMap* pairing, const EnsembleConfig& cfg) {
  if (cfg.n_traj == 0) throw ModelError("n_traj must be positive");
  if (cfg.workers == 0) throw ModelError("worker count must be positive");
  for (double t : cfg.checkpoints) grid.index_of(t);

  TrajectoryOptions options;
  options.route = cfg.route;
  options.record_series = false;
  options.snapshot_times = cfg.checkpoints;

  std::vector<Trajectory> runs(cfg.n_traj);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.n_traj) return;
      try {
        runs[i] = integrate_trajectory(grid, model, kind, pairing, cfg.master_seed, i, options);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = cfg.n_traj;
        return;
      }
    }
  };
  const std::size_t workers = std::min(cfg.workers, cfg.n_traj);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  EnsembleResult result;
  result.unraveling = kind;
  result.n_traj = cfg.n_traj;
  for (const auto& run : runs) {
    if (run.status == TrajectoryStatus::Completed) {
      ++result.completed;
    } else {
      ++result.failures;
      result.failed_indices.push_back(run.index);
      result.failure_times.push_back(run.failure_time);
    }
  }
  result.failure_rate = static_cast<double>(result.failures) / static_cast<double>(cfg.n_traj);
  result.failed = result.failure_rate > kMaxFailureRate;
  if (result.failed) {
    result.diagnostics = std::to_string(result.failures) + " of " + std::to_string(cfg.n_traj) +
                         " trajectories hit a wavefunction node (limit " +
                         std::to_string(kMaxFailureRate * 100.0) + "%)";
  }

  const auto dim = static_cast<Eigen::Index>(model.system.dim());
  const double m = static_cast<double>(result.completed);
  for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
    CheckpointSummary s;
    const std::size_t lattice = grid.index_of(cfg.checkpoints[c]);
    const StateVector& psi = grid.at_index(lattice);
    s.time = psi.time;

    std::vector<const Snapshot*> snaps;
    for (const auto& run : runs) {
      if (run.status == TrajectoryStatus::Completed) snaps.push_back(&run.snapshots[c]);
    }

    CMatrix sum = CMatrix::Zero(dim, dim);
    std::vector<double> obs_sum(cfg.observables.size(), 0.0);
    std::vector<std::vector<double>> coords;
    for (const Snapshot* snap : snaps) {
      const CVector& ket = snap->conditioned.ket;
      sum += ket * ket.adjoint();
      for (std::size_t o = 0; o < obs_sum.size(); ++o) obs_sum[o] += expectation(ket, cfg.observables[o].op).real();
      const std::vector<double> q = flatten(snap->hidden);
      if (coords.empty()) coords.resize(q.size());
      for (std::size_t j = 0; j < q.size(); ++j) coords[j].push_back(q[j]);
    }
    s.estimate = m > 0.0 ? CMatrix(sum / m) : CMatrix(CMatrix::Zero(dim, dim));
    std::vector<double> obs_mean(obs_sum.size());
    for (std::size_t o = 0; o < obs_sum.size(); ++o) obs_mean[o] = m > 0.0 ? obs_sum[o] / m : 0.0;

    Eigen::MatrixXd re_dev = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd im_dev = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> obs_dev(obs_sum.size(), 0.0);
    for (const Snapshot* snap : snaps) {
      const CVector& ket = snap->conditioned.ket;
      const CMatrix d = ket * ket.adjoint() - s.estimate;
      re_dev += d.real().cwiseAbs2();
      im_dev += d.imag().cwiseAbs2();
      for (std::size_t o = 0; o < obs_dev.size(); ++o) {
        const double v = expectation(ket, cfg.observables[o].op).real() - obs_mean[o];
        obs_dev[o] += v * v;
      }
    }
    const double se_scale = m > 1.0 ? 1.0 / std::sqrt((m - 1.0) * m) : 0.0;
    s.standard_error = CMatrix::Zero(dim, dim);
    s.standard_error.real() = re_dev.cwiseSqrt() * se_scale;
    s.standard_error.imag() = im_dev.cwiseSqrt() * se_scale;
    s.exact = partial_trace_bath(psi).entries();
    s.trace_distance = trace_distance(s.estimate, s.exact);

    for (std::size_t o = 0; o < obs_sum.size(); ++o) {
      ObservableEstimate e;
      e.name = cfg.observables[o].name;
      e.mean = obs_mean[o];
      e.standard_error = std::sqrt(obs_dev[o]) * se_scale;
      e.exact = (s.exact * cfg.observables[o].op).trace().real();
      s.observables.push_back(std::move(e));
    }

    const CoordinateMoments reference = hidden_moments(psi, kind, pairing);
    s.reference_mean = reference.mean;
    s.reference_variance = reference.variance;
    const std::size_t d = reference.mean.size();
    s.hidden_mean.resize(d);
    s.hidden_mean_se.resize(d);
    s.hidden_variance.resize(d);
    s.hidden_variance_se.resize(d);
    if (!coords.empty()) {
      for (std::size_t j = 0; j < d; ++j) {
        coordinate_statistics(coords[j], s.hidden_mean[j], s.hidden_mean_se[j], s.hidden_variance[j],
                              s.hidden_variance_se[j]);
      }
    }
    result.checkpoints.push_back(std::move(s));
  }
  return result;
}

}  // namespace nmsse
