#include "nmsse/bell.hpp"

#include <cmath>
#include <string>

#include "nmsse/error.hpp"
#include "nmsse/propagator.hpp"
#include "nmsse/rng.hpp"

namespace nmsse {

RateError::RateError(std::size_t from, std::size_t to, double current, double probability)
    : Error("current " + std::to_string(current) + " from state " + std::to_string(from) + " into state " +
            std::to_string(to) + " whose probability " + std::to_string(probability) + " is numerically zero") {}

std::size_t Decomposition::dim() const {
  if (projectors.empty()) throw ModelError("decomposition has no projectors");
  return static_cast<std::size_t>(projectors.front().rows());
}

void Decomposition::validate(double tol) const {
  const std::size_t d = dim();
  if (!values.empty() && values.size() != projectors.size()) {
    throw ModelError("decomposition needs one value per projector");
  }
  if (null_index && *null_index >= projectors.size()) throw ModelError("null projector index out of range");
  CMatrix sum = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < projectors.size(); ++n) {
    const CMatrix& p = projectors[n];
    if (static_cast<std::size_t>(p.rows()) != d || static_cast<std::size_t>(p.cols()) != d) {
      throw DimensionError("projector " + std::to_string(n) + " has the wrong shape");
    }
    for (std::size_t m = 0; m < projectors.size(); ++m) {
      const CMatrix prod = p * projectors[m];
      const double err = n == m ? (prod - p).cwiseAbs().maxCoeff() : prod.cwiseAbs().maxCoeff();
      if (err > tol) {
        throw ModelError("projectors " + std::to_string(n) + " and " + std::to_string(m) +
                         " are not orthogonal idempotents");
      }
    }
    sum += p;
  }
  if ((sum - CMatrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff() > tol) {
    throw ModelError("projectors do not sum to the identity");
  }
}

Decomposition Decomposition::computational(std::size_t dim) {
  Decomposition dec;
  for (std::size_t n = 0; n < dim; ++n) {
    CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
    dec.projectors.push_back(std::move(p));
    dec.values.push_back(static_cast<double>(n));
  }
  return dec;
}

std::vector<double> probabilities(const CVector& phi, const Decomposition& dec) {
  std::vector<double> p(dec.size());
  for (std::size_t n = 0; n < dec.size(); ++n) p[n] = phi.dot(dec.projectors[n] * phi).real();
  return p;
}

Eigen::MatrixXd current_matrix(const CVector& phi, const Decomposition& dec, const HamiltonianFn& h, double t) {
  const std::size_t count = dec.size();
  std::vector<CVector> parts(count);
  std::vector<CVector> h_parts(count);
  for (std::size_t m = 0; m < count; ++m) {
    parts[m] = dec.projectors[m] * phi;
    h(t, parts[m], h_parts[m]);
  }
  const auto n_count = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n_count, n_count);
  for (Eigen::Index n = 0; n < n_count; ++n) {
    for (Eigen::Index m = n + 1; m < n_count; ++m) {
      const double value = 2.0 * parts[static_cast<std::size_t>(n)].dot(h_parts[static_cast<std::size_t>(m)]).imag();
      j(n, m) = value;
      j(m, n) = -value;
    }
  }
  return j;
}

Eigen::MatrixXd bell_rates(const Eigen::MatrixXd& currents, const std::vector<double>& probs) {
  const Eigen::Index count = currents.rows();
  if (currents.cols() != count || static_cast<std::size_t>(count) != probs.size()) {
    throw DimensionError("current matrix and probabilities disagree in size");
  }
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(count, count);
  for (Eigen::Index n = 0; n < count; ++n) {
    for (Eigen::Index m = n + 1; m < count; ++m) {
      const double j = currents(n, m);
      if (j == 0.0) continue;
      // j > 0 carries probability m -> n, j < 0 carries it n -> m
      const Eigen::Index to = j > 0.0 ? n : m;
      const Eigen::Index from = j > 0.0 ? m : n;
      const double p_from = probs[static_cast<std::size_t>(from)];
      if (p_from <= kRateProbabilityFloor) {
        if (std::abs(j) > kRateCurrentFloor) {
          throw RateError(static_cast<std::size_t>(from), static_cast<std::size_t>(to), std::abs(j), p_from);
        }
        continue;
      }
      rates(to, from) = std::abs(j) / p_from;
    }
  }
  return rates;
}

DiscreteGuide::DiscreteGuide(const CVector& initial, const HamiltonianFn& h, const Decomposition& dec, double dt,
                             double t_final)
    : dec_(dec), dt_(dt) {
  dec_.validate();
  if (static_cast<std::size_t>(initial.size()) != dec_.dim()) {
    throw DimensionError("initial state does not match the decomposition dimension");
  }
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw ModelError("dt must be positive and t_final nonnegative");
  const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));

  CVector phi = initial;
  CVector next;
  for (std::size_t i = 0;; ++i) {
    const double t = time(i);
    const double drift = std::abs(phi.norm() - 1.0);
    if (drift > 1e-6) throw IntegrationFailure(IntegrationFailure::Reason::NormDrift, i, drift);

    auto probs = nmsse::probabilities(phi, dec_);
    Eigen::MatrixXd j = current_matrix(phi, dec_, h, t);
    double flow = 0.0;
    for (Eigen::Index n = 0; n < j.rows(); ++n) {
      for (Eigen::Index m = n + 1; m < j.cols(); ++m) flow += std::abs(j(n, m));
    }
    if (flow * dt > kMaxStepJumpProbability) {
      throw IntegrationFailure(IntegrationFailure::Reason::StepProbability, i, flow * dt);
    }
    rates_.push_back(bell_rates(j, probs));
    currents_.push_back(std::move(j));
    probs_.push_back(std::move(probs));
    states_.push_back(phi);
    if (i == steps) break;
    rk4_step(h, t, dt, phi, next);
    phi.swap(next);
  }
}

std::size_t DiscreteGuide::index_near(double t) const {
  const double pos = std::round(t / dt_);
  if (pos < 0.0 || pos > static_cast<double>(size() - 1)) {
    throw LatticeError("time " + std::to_string(t) + " lies outside the guide");
  }
  return static_cast<std::size_t>(pos);
}

OccupationPath simulate_jump_process(const DiscreteGuide& guide, std::uint64_t master_seed, std::uint64_t index,
                                     std::optional<std::size_t> n0) {
  RngStream rng(master_seed, index);
  const Decomposition& dec = guide.decomposition();
  const std::size_t count = dec.size();

  std::size_t n = 0;
  if (n0) {
    if (*n0 >= count) throw ModelError("initial occupation index out of range");
    n = *n0;
  } else {
    const auto& p0 = guide.probabilities(0);
    double u = uniform(rng);
    n = count - 1;
    for (std::size_t m = 0; m < count; ++m) {
      if (u < p0[m]) {
        n = m;
        break;
      }
      u -= p0[m];
    }
  }

  OccupationPath path;
  path.occupied.reserve(guide.size());
  const double dt = guide.dt();
  for (std::size_t i = 0; i < guide.size(); ++i) {
    if (dec.null_index && n == *dec.null_index) {
      throw std::logic_error("jump process occupied the zero-probability auxiliary projector");
    }
    path.occupied.push_back(n);
    if (i + 1 == guide.size()) break;

    const Eigen::MatrixXd& rates = guide.rates(i);
    double out = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      if (m != n) out += rates(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    }
    if (out <= 0.0) continue;
    if (uniform(rng) >= -std::expm1(-out * dt)) continue;

    double pick = uniform(rng) * out;
    std::size_t dest = n;
    for (std::size_t m = 0; m < count; ++m) {
      if (m == n) continue;
      const double r = rates(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      if (r <= 0.0) continue;
      dest = m;
      if (pick < r) break;
      pick -= r;
    }
    n = dest;
    ++path.jumps;
  }
  return path;
}

JumpStatistics jump_statistics(const DiscreteGuide& guide, const std::vector<double>& checkpoints,
                               std::size_t runs, std::uint64_t master_seed) {
  const std::size_t count = guide.decomposition().size();
  JumpStatistics stats;
  stats.runs = runs;
  std::vector<std::size_t> at;
  for (double t : checkpoints) {
    const std::size_t i = guide.index_near(t);
    at.push_back(i);
    stats.times.push_back(guide.time(i));
    stats.exact.push_back(guide.probabilities(i));
  }
  stats.empirical.assign(at.size(), std::vector<double>(count, 0.0));
  for (std::size_t r = 0; r < runs; ++r) {
    const OccupationPath path = simulate_jump_process(guide, master_seed, r);
    stats.total_jumps += path.jumps;
    for (std::size_t c = 0; c < at.size(); ++c) stats.empirical[c][path.occupied[at[c]]] += 1.0;
  }
  if (runs > 0) {
    for (auto& row : stats.empirical) {
      for (auto& v : row) v /= static_cast<double>(runs);
    }
  }
  return stats;
}

}  // namespace nmsse
