#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nmsse/basis.hpp"
#include "nmsse/model.hpp"

namespace nmsse {

// Orthogonal, complete projector family with a label per member. A POM enters
// through its Naimark extension; `null_index` marks the auxiliary projector that
// carries zero probability.
struct Decomposition {
  std::vector<CMatrix> projectors;
  std::vector<double> values;
  std::optional<std::size_t> null_index;

  std::size_t size() const noexcept { return projectors.size(); }
  std::size_t dim() const;
  // Pi_n Pi_m = delta_nm Pi_n and sum Pi_n = 1, both to `tol`.
  void validate(double tol = 1e-10) const;

  // {|n><n|} with values 0, 1, ..., dim-1.
  static Decomposition computational(std::size_t dim);
};

// P_n = <Phi|Pi_n|Phi>.
std::vector<double> probabilities(const CVector& phi, const Decomposition& dec);

// J_nm = 2 Im <Phi|Pi_n H(t) Pi_m|Phi>, evaluated once per pair n < m with J_mn = -J_nm.
Eigen::MatrixXd current_matrix(const CVector& phi, const Decomposition& dec, const HamiltonianFn& h, double t);

// T(n, m) is the rate for the jump m -> n:
//   J_nm > 0: T_nm = J_nm / P_m,  T_mn = 0
//   J_nm < 0: T_mn = -J_nm / P_n, T_nm = 0
// Throws RateError when the division would be by P <= 1e-14 with |J| > 1e-12.
Eigen::MatrixXd bell_rates(const Eigen::MatrixXd& currents, const std::vector<double>& probs);

inline constexpr double kRateProbabilityFloor = 1e-14;
inline constexpr double kRateCurrentFloor = 1e-12;
// Bound on the population-averaged jump probability per step.
inline constexpr double kMaxStepJumpProbability = 0.1;

// Guide |Phi(t)> of a discrete model sampled on t_i = i dt, with probabilities
// and Bell rates precomputed at each lattice point.
class DiscreteGuide {
 public:
  DiscreteGuide(const CVector& initial, const HamiltonianFn& h, const Decomposition& dec, double dt,
                double t_final);

  std::size_t size() const noexcept { return states_.size(); }
  double dt() const noexcept { return dt_; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt_; }
  const CVector& state(std::size_t i) const { return states_.at(i); }
  const std::vector<double>& probabilities(std::size_t i) const { return probs_.at(i); }
  const Eigen::MatrixXd& currents(std::size_t i) const { return currents_.at(i); }
  const Eigen::MatrixXd& rates(std::size_t i) const { return rates_.at(i); }
  const Decomposition& decomposition() const noexcept { return dec_; }
  // Nearest lattice index to t.
  std::size_t index_near(double t) const;

 private:
  Decomposition dec_;
  double dt_;
  std::vector<CVector> states_;
  std::vector<std::vector<double>> probs_;
  std::vector<Eigen::MatrixXd> currents_;
  std::vector<Eigen::MatrixXd> rates_;
};

// Piecewise-constant occupation: occupied[i] holds over [t_i, t_{i+1}).
struct OccupationPath {
  std::vector<std::size_t> occupied;
  std::size_t jumps = 0;
};

// Per step the occupant of n leaves with probability 1 - exp(-sum_m T_mn dt) and
// picks m with weight T_mn. Without n0 the start is drawn from P(0).
OccupationPath simulate_jump_process(const DiscreteGuide& guide, std::uint64_t master_seed, std::uint64_t index,
                                     std::optional<std::size_t> n0 = std::nullopt);

struct JumpStatistics {
  std::vector<double> times;                  // lattice times nearest the requested checkpoints
  std::vector<std::vector<double>> empirical;  // [checkpoint][n]
  std::vector<std::vector<double>> exact;      // [checkpoint][n]
  std::size_t runs = 0;
  std::size_t total_jumps = 0;
};

JumpStatistics jump_statistics(const DiscreteGuide& guide, const std::vector<double>& checkpoints,
                               std::size_t runs, std::uint64_t master_seed);

}  // namespace nmsse
