#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nmsse/error.hpp"
#include "nmsse/trajectory.hpp"
#include "nmsse/unraveling.hpp"
#include "nmsse/verification.hpp"
#include "oracles.hpp"

namespace {

using namespace nmsse;

struct Moments {
  double mean = 0.0, var = 0.0, var_se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    m2 += (x - m.mean) * (x - m.mean);
    m4 += std::pow(x - m.mean, 4);
  }
  m2 /= n;
  m4 /= n;
  m.var = m2;
  m.var_se = std::sqrt((m4 - m2 * m2) / n);
  return m;
}

const CVector kPlus = oracle::ket(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));

TEST(Sampler, PositionMomentsMatchVacuumDensity) {
  const BathSpec bath{{{1.0, 0.4}}};
  const int n = 100000;
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) {
    RngStream rng(2024, static_cast<std::uint64_t>(i));
    xs.push_back(std::get<PositionVars>(sample_initial(Unraveling::Position, bath, nullptr, rng)).x[0]);
  }
  const Moments m = moments(xs);
  EXPECT_LE(std::abs(m.mean), 4.0 * std::sqrt(0.5 / n));
  EXPECT_NEAR(m.var, 0.5, 3.0 * m.var_se);
}

TEST(Sampler, CoherentSecondMoment) {
  const BathSpec bath{{{1.0, 0.4}, {-1.0, 0.4}}};
  const int n = 100000;
  std::vector<double> r2;
  RngStream rng(77, 0);
  for (int i = 0; i < n; ++i) {
    const auto a = std::get<CoherentVars>(sample_initial(Unraveling::Coherent, bath, nullptr, rng)).a;
    r2.push_back(std::norm(a[1]));
  }
  const Moments m = moments(r2);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * std::sqrt(m.var / n));
}

TEST(Sampler, QuadratureArityAndDeterminism) {
  const BathSpec bath{{{1.0, 0.4}, {-1.0, 0.4}, {2.0, 0.1}, {-2.0, 0.1}}};
  const PairingMap p = check_symmetric_pairs(bath);
  RngStream a(5, 9), b(5, 9);
  const auto qa = std::get<QuadratureVars>(sample_initial(Unraveling::Quadrature, bath, &p, a));
  const auto qb = std::get<QuadratureVars>(sample_initial(Unraveling::Quadrature, bath, &p, b));
  EXPECT_EQ(qa.xplus.size(), 2u);
  EXPECT_EQ(qa.xplus, qb.xplus);
  EXPECT_EQ(qa.yminus, qb.yminus);
  RngStream c(5, 9);
  EXPECT_THROW(sample_initial(Unraveling::Quadrature, bath, nullptr, c), ModelError);
}

TEST(ClosedVelocity, ReferenceValues) {
  const BathSpec bath{{{1.0, 1.0}}};
  for (Unraveling kind : {Unraveling::Position, Unraveling::Coherent}) {
    for (double v : velocity_closed(kind, 0.0, bath, nullptr, 0.3)) EXPECT_EQ(v, 0.0);
  }
  const Complex lexp = expectation(kPlus, oracle::two_level(kPlus).lowering);
  EXPECT_NEAR(lexp.real(), 0.5, 1e-15);
  EXPECT_NEAR(velocity_closed(Unraveling::Position, lexp, bath, nullptr, 0.0)[0], 0.70711, 1e-5);
  const auto coherent = velocity_closed(Unraveling::Coherent, lexp, bath, nullptr, 0.0);
  EXPECT_NEAR(coherent[0], 0.5, 1e-15);
  EXPECT_NEAR(coherent[1], 0.0, 1e-15);
}

TEST(Noise, ReferenceValues) {
  const BathSpec bath{{{1.0, 0.5}}};
  const NoiseSample z = noise_z(PositionVars{{1.0}}, bath, std::numbers::pi / 2.0, nullptr);
  EXPECT_NEAR(z.z.real(), 0.0, 1e-15);
  EXPECT_NEAR(z.z.imag(), -0.70711, 1e-5);
  EXPECT_EQ(noise_z(PositionVars{{0.0}}, bath, 0.4, nullptr).z, Complex(0.0, 0.0));
  const BathSpec paired{{{1.0, 0.5}, {-1.0, 0.5}}};
  const PairingMap p = check_symmetric_pairs(paired);
  for (double t : {0.0, 0.3, 1.7}) {
    const NoiseSample q = noise_z(QuadratureVars{{0.8}, {-1.1}}, paired, t, &p);
    EXPECT_EQ(q.z.imag(), 0.0);
    EXPECT_NEAR(q.z.real(), 2.0 * 0.5 * (0.8 * std::cos(t) - 1.1 * std::sin(t)), 1e-15);
  }
}

class VelocityOracle : public ::testing::TestWithParam<Unraveling> {};

TEST_P(VelocityOracle, GeneralEqualsClosedOnRandomStates) {
  EXPECT_LE(velocity_oracle_deviation(GetParam(), 25, 606), 1e-8);
}

TEST_P(VelocityOracle, CorruptedSignIsDetected) {
  EXPECT_GT(velocity_oracle_deviation(GetParam(), 5, 606, true), 1e-2);
}

TEST_P(VelocityOracle, ZeroCouplingGivesZeroDrift) {
  std::mt19937_64 gen(51);
  const SystemSpec sys = oracle::two_level(kPlus);
  const BathSpec bath{{{1.0, 0.0}, {-1.0, 0.0}}};
  const PairingMap p = check_symmetric_pairs(bath);
  const auto basis = BasisDescriptor::dense_fock(2, 2, 2);
  const StateVector s(basis, oracle::random_state(static_cast<Eigen::Index>(basis.dimension()), gen));
  RngStream rng(1, 1);
  const HiddenVars hv = sample_initial(GetParam(), bath, &p, rng);
  for (double v : velocity_general(s, hv, 0.4, bath, sys, &p)) EXPECT_NEAR(v, 0.0, 1e-15);
}

INSTANTIATE_TEST_SUITE_P(AllUnravelings, VelocityOracle,
                         ::testing::Values(Unraveling::Position, Unraveling::Quadrature, Unraveling::Coherent),
                         [](const auto& info) { return std::string(to_string(info.param)); });

GuidingStateGrid guide(const Model& m, double t_final, double dt = 1e-2) {
  return evolve(m.initial_state(), UniverseHamiltonian(m.system, m.bath, m.basis).as_function(),
                IntegratorConfig{dt, t_final, 1});
}

class TrajectoryRoutes : public ::testing::TestWithParam<Unraveling> {};

TEST_P(TrajectoryRoutes, ClosedAndGeneralRoutesAgree) {
  const Model m = reference::standard_model();
  const PairingMap p = check_symmetric_pairs(m.bath);
  const GuidingStateGrid grid = guide(m, 0.5);
  TrajectoryOptions closed;
  TrajectoryOptions general;
  general.route = VelocityRoute::General;
  for (std::uint64_t index = 0; index < 3; ++index) {
    const Trajectory a = integrate_trajectory(grid, m, GetParam(), &p, 8, index, closed);
    const Trajectory b = integrate_trajectory(grid, m, GetParam(), &p, 8, index, general);
    ASSERT_EQ(a.hidden.size(), b.hidden.size());
    for (std::size_t i = 0; i < a.hidden.size(); ++i) {
      const auto qa = flatten(a.hidden[i]);
      const auto qb = flatten(b.hidden[i]);
      for (std::size_t j = 0; j < qa.size(); ++j) EXPECT_NEAR(qa[j], qb[j], 1e-10);
    }
  }
}

TEST_P(TrajectoryRoutes, ReplayIsBitIdentical) {
  const Model m = reference::standard_model();
  const PairingMap p = check_symmetric_pairs(m.bath);
  const GuidingStateGrid grid = guide(m, 0.5);
  TrajectoryOptions opt;
  opt.snapshot_times = {0.2, 0.5};
  opt.observables = {m.system.lowering};
  const Trajectory a = integrate_trajectory(grid, m, GetParam(), &p, 3, 4, opt);
  const Trajectory b = integrate_trajectory(grid, m, GetParam(), &p, 3, 4, opt);
  ASSERT_EQ(a.times.size(), grid.size());
  ASSERT_EQ(a.hidden.size(), grid.size());
  ASSERT_EQ(a.noise.size(), grid.size());
  ASSERT_EQ(a.lexp.size(), grid.size());
  for (std::size_t i = 0; i < a.hidden.size(); ++i) {
    ASSERT_EQ(flatten(a.hidden[i]), flatten(b.hidden[i]));
    ASSERT_EQ(a.noise[i].z, b.noise[i].z);
    ASSERT_EQ(a.lexp[i], b.lexp[i]);
    ASSERT_EQ(a.observables[i], b.observables[i]);
  }
  ASSERT_EQ(a.snapshots.size(), 2u);
  for (std::size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(a.snapshots[s].conditioned.ket, b.snapshots[s].conditioned.ket);
    const std::size_t i = grid.index_of(a.snapshots[s].time);
    const ConditionedState c = condition(grid.at_index(i), a.hidden[i], &p);
    EXPECT_LT((c.ket - a.snapshots[s].conditioned.ket).norm(), 1e-14);
    EXPECT_NEAR(std::abs(a.snapshots[s].conditioned.ket.norm() - 1.0), 0.0, 1e-10);
  }
  if (GetParam() == Unraveling::Quadrature) {
    for (const auto& z : a.noise) EXPECT_EQ(z.z.imag(), 0.0);
  }
}

TEST_P(TrajectoryRoutes, ZeroCouplingKeepsHiddenValuesConstant) {
  const SystemSpec sys = oracle::two_level(kPlus);
  const Model m(sys, BathSpec{{{1.0, 0.0}, {-1.0, 0.0}}}, BasisDescriptor::dense_fock(2, 2, 1));
  const PairingMap p = check_symmetric_pairs(m.bath);
  const GuidingStateGrid grid = guide(m, 1.0);
  const Trajectory t = integrate_trajectory(grid, m, GetParam(), &p, 12, 0);
  EXPECT_EQ(t.status, TrajectoryStatus::Completed);
  for (const auto& hv : t.hidden) EXPECT_EQ(flatten(hv), flatten(t.hidden.front()));
  for (const auto& z : t.noise) EXPECT_EQ(z.z, Complex(0.0, 0.0));
}

INSTANTIATE_TEST_SUITE_P(AllUnravelings, TrajectoryRoutes,
                         ::testing::Values(Unraveling::Position, Unraveling::Quadrature, Unraveling::Coherent),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Trajectory, SingleResonantModeDualPath) {
  const SystemSpec sys = oracle::two_level(oracle::ket(1.0, 0.0));
  const Model m(sys, BathSpec{{{0.0, 0.5}}}, BasisDescriptor::single_excitation(2, 1));
  const GuidingStateGrid grid = guide(m, 2.0);
  TrajectoryOptions general;
  general.route = VelocityRoute::General;
  general.initial = PositionVars{{0.35}};
  TrajectoryOptions closed;
  closed.initial = general.initial;
  const Trajectory a = integrate_trajectory(grid, m, Unraveling::Position, nullptr, 0, 0, closed);
  const Trajectory b = integrate_trajectory(grid, m, Unraveling::Position, nullptr, 0, 0, general);
  for (std::size_t i = 0; i < a.hidden.size(); ++i) {
    EXPECT_NEAR(flatten(a.hidden[i])[0], flatten(b.hidden[i])[0], 1e-10);
  }
  EXPECT_NE(flatten(a.hidden.back())[0], 0.35);
}

TEST(Trajectory, NodeIsRecordedAsFailure) {
  const SystemSpec sys = oracle::two_level(oracle::ket(1.0, 0.0));
  const Model m(sys, BathSpec{{{0.0, 0.0}}}, BasisDescriptor::dense_fock(2, 1, 2));
  CVector v = CVector::Zero(6);
  v(1) = 1.0;  // |e, 1>: psi_1(0) = 0
  const GuidingStateGrid grid = evolve(StateVector(m.basis, v),
                                       UniverseHamiltonian(m.system, m.bath, m.basis).as_function(),
                                       IntegratorConfig{0.01, 0.1, 1});
  TrajectoryOptions opt;
  opt.initial = PositionVars{{0.0}};
  const Trajectory t = integrate_trajectory(grid, m, Unraveling::Position, nullptr, 0, 0, opt);
  EXPECT_EQ(t.status, TrajectoryStatus::NodeFailure);
  EXPECT_EQ(t.failure_time, 0.0);
}

}  // namespace
