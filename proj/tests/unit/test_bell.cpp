#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nmsse/bell.hpp"
#include "nmsse/error.hpp"
#include "nmsse/propagator.hpp"
#include "nmsse/verification.hpp"
#include "oracles.hpp"

namespace {

using namespace nmsse;

HamiltonianFn constant(const CMatrix& h) {
  return [h](double, const CVector& in, CVector& out) {
    out = h * in;
    return 0.0;
  };
}

CMatrix sigma_x() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 1) = s(1, 0) = 1.0;
  return s;
}

// Random orthogonal decomposition: columns of a random unitary grouped into blocks.
Decomposition random_decomposition(Eigen::Index dim, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = Complex(n(gen), n(gen));
  }
  const CMatrix u = Eigen::HouseholderQR<CMatrix>(m).householderQ();
  Decomposition dec;
  Eigen::Index start = 0;
  std::uniform_int_distribution<Eigen::Index> width(1, 3);
  while (start < dim) {
    const Eigen::Index w = std::min(width(gen), dim - start);
    const CMatrix cols = u.middleCols(start, w);
    dec.projectors.push_back(cols * cols.adjoint());
    dec.values.push_back(static_cast<double>(dec.projectors.size()));
    start += w;
  }
  return dec;
}

TEST(Decomposition, ComputationalIsValid) {
  const Decomposition d = Decomposition::computational(3);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dim(), 3u);
  EXPECT_NO_THROW(d.validate());
  Decomposition broken = d;
  broken.projectors.pop_back();
  EXPECT_THROW(broken.validate(), ModelError);
}

TEST(Probabilities, Examples) {
  const Decomposition d = Decomposition::computational(2);
  EXPECT_EQ(probabilities(oracle::ket(1.0, 0.0), d), (std::vector<double>{1.0, 0.0}));
  const auto p = probabilities(oracle::ket(1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0))), d);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Currents, StationaryDecompositionCarriesNoCurrent) {
  std::mt19937_64 gen(61);
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 0) = 0.4;
  h(1, 1) = -1.1;
  h(2, 2) = 2.0;
  const CVector phi = oracle::random_state(3, gen);
  EXPECT_EQ(current_matrix(phi, Decomposition::computational(3), constant(h), 0.0).norm(), 0.0);
}

TEST(Currents, TwoLevelRabiValue) {
  const double omega = 1.3, theta = 0.4;
  const CVector phi = oracle::ket(std::cos(theta), Complex(0.0, std::sin(theta)));
  const Eigen::MatrixXd j = current_matrix(phi, Decomposition::computational(2), constant(0.5 * omega * sigma_x()), 0.0);
  // d/dt |<1|Phi>|^2 = 2 Re(conj(phi_1) (-i omega/2) phi_0) = -omega sin(theta) cos(theta)
  EXPECT_NEAR(j(1, 0), -omega * std::sin(theta) * std::cos(theta), 1e-15);
  EXPECT_EQ(j(0, 1), -j(1, 0));
}

TEST(Currents, MatchFiniteDifferenceOfProbabilities) {
  std::mt19937_64 gen(62);
  for (Eigen::Index dim : {2, 5, 9, 16}) {
    const CMatrix h = oracle::random_hermitian(dim, gen);
    const Decomposition dec = random_decomposition(dim, gen);
    ASSERT_NO_THROW(dec.validate());
    const CVector phi = oracle::random_state(dim, gen);
    const double dt = 1e-4;
    CVector fwd, bwd;
    rk4_step(constant(h), 0.0, dt, phi, fwd);
    rk4_step(constant(h), 0.0, -dt, phi, bwd);
    const auto pf = probabilities(fwd, dec);
    const auto pb = probabilities(bwd, dec);
    const Eigen::MatrixXd j = current_matrix(phi, dec, constant(h), 0.0);
    for (std::size_t n = 0; n < dec.size(); ++n) {
      const double fd = (pf[n] - pb[n]) / (2.0 * dt);
      EXPECT_LE(std::abs(fd - j.row(static_cast<Eigen::Index>(n)).sum()), 1e-6) << dim << " " << n;
    }
    EXPECT_EQ(j, Eigen::MatrixXd(-j.transpose()));
  }
}

TEST(Rates, BellRuleExamples) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(1, 0) = 0.2;
  j(0, 1) = -0.2;
  const Eigen::MatrixXd t = bell_rates(j, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(t(1, 0), 0.4);
  EXPECT_EQ(t(0, 1), 0.0);
  EXPECT_EQ(bell_rates(Eigen::MatrixXd::Zero(3, 3), {0.2, 0.3, 0.5}).norm(), 0.0);
}

TEST(Rates, CurrentOutOfEmptyStateIsAnError) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(1, 0) = 1e-3;
  j(0, 1) = -1e-3;
  EXPECT_THROW(bell_rates(j, {0.0, 1.0}), RateError);
  j(1, 0) = 1e-13;
  j(0, 1) = -1e-13;
  EXPECT_NO_THROW(bell_rates(j, {0.0, 1.0}));
}

TEST(Rates, NonnegativeAndReconstructCurrents) {
  std::mt19937_64 gen(63);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index dim = 6;
    const CMatrix h = oracle::random_hermitian(dim, gen);
    const Decomposition dec = random_decomposition(dim, gen);
    const CVector phi = oracle::random_state(dim, gen);
    const auto p = probabilities(phi, dec);
    const Eigen::MatrixXd j = current_matrix(phi, dec, constant(h), 0.0);
    const Eigen::MatrixXd t = bell_rates(j, p);
    EXPECT_GE(t.minCoeff(), 0.0);
    for (Eigen::Index n = 0; n < j.rows(); ++n) {
      for (Eigen::Index m = 0; m < j.cols(); ++m) {
        if (n == m) continue;
        EXPECT_LE(std::abs(t(n, m) * p[m] - t(m, n) * p[n] - j(n, m)), 1e-12);
      }
    }
  }
}

TEST(JumpProcess, StationaryDecompositionNeverJumps) {
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 0) = 1.0;
  const CVector phi = oracle::ket(std::sqrt(0.3), std::sqrt(0.7));
  const DiscreteGuide g(phi, constant(h), Decomposition::computational(2), 1e-2, 2.0);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const OccupationPath path = simulate_jump_process(g, 4, i);
    EXPECT_EQ(path.jumps, 0u);
    for (std::size_t n : path.occupied) EXPECT_EQ(n, path.occupied.front());
  }
}

TEST(JumpProcess, RabiOccupationTracksBornProbabilities) {
  const DiscreteGuide g = reference::rabi_guide(1e-3, std::numbers::pi);
  const double q = std::numbers::pi;
  const JumpStatistics s = jump_statistics(g, {q / 4.0, q / 2.0, q}, 10000, 17);
  ASSERT_EQ(s.times.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    const double p1 = std::pow(std::sin(s.times[c] / 2.0), 2);
    EXPECT_NEAR(s.exact[c][1], p1, 1e-9);
    EXPECT_NEAR(s.empirical[c][1], p1, 0.02);
    const double sigma = std::sqrt(std::max(p1 * (1.0 - p1), 1e-4) / 10000.0);
    EXPECT_LE(std::abs(s.empirical[c][1] - s.exact[c][1]), 3.0 * sigma + 1e-3);
  }
  EXPECT_GT(s.total_jumps, 0u);
}

TEST(JumpProcess, ReplayIsBitIdentical) {
  const DiscreteGuide g = reference::rabi_guide(1e-3, 2.0);
  const OccupationPath a = simulate_jump_process(g, 9, 3);
  const OccupationPath b = simulate_jump_process(g, 9, 3);
  EXPECT_EQ(a.occupied, b.occupied);
  EXPECT_EQ(a.jumps, b.jumps);
}

TEST(JumpProcess, CoarseStepIsRejected) {
  const CMatrix h = 20.0 * sigma_x();
  EXPECT_THROW(DiscreteGuide(oracle::ket(1.0, 0.0), constant(h), Decomposition::computational(2), 0.05, 1.0),
               IntegrationFailure);
}

TEST(JumpProcess, NaimarkNullProjectorIsNeverOccupied) {
  CMatrix h = CMatrix::Zero(3, 3);
  h.topLeftCorner(2, 2) = 0.5 * sigma_x();
  Decomposition dec = Decomposition::computational(3);
  dec.null_index = 2;
  CVector phi = CVector::Zero(3);
  phi(0) = 1.0;
  const DiscreteGuide g(phi, constant(h), dec, 1e-3, 2.0);
  for (std::uint64_t i = 0; i < 100; ++i) {
    for (std::size_t n : simulate_jump_process(g, 1, i).occupied) EXPECT_NE(n, 2u);
  }
  EXPECT_THROW(simulate_jump_process(g, 1, 0, 2), std::logic_error);
}

}  // namespace
