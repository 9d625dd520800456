#include <random>

#include <gtest/gtest.h>

#include "nmsse/basis.hpp"
#include "nmsse/error.hpp"
#include "oracles.hpp"

namespace {

using namespace nmsse;

StateVector single_mode(std::size_t n_max, std::size_t n, Complex amp) {
  const auto basis = BasisDescriptor::dense_fock(1, 1, n_max);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  v(static_cast<Eigen::Index>(n)) = amp;
  return StateVector(basis, v);
}

TEST(Basis, DenseFockLabelsPutLastModeFastest) {
  const auto b = BasisDescriptor::dense_fock(2, 3, 2);
  EXPECT_EQ(b.bath_dim(), 27u);
  EXPECT_EQ(b.dimension(), 54u);
  EXPECT_EQ(b.stride(2), 1u);
  EXPECT_EQ(b.stride(0), 9u);
  EXPECT_EQ(b.occupation(9 * 2 + 3 * 1 + 0, 0), 2u);
  EXPECT_EQ(b.occupation(9 * 2 + 3 * 1 + 0, 1), 1u);
  EXPECT_EQ(b.index(1, 5), 27u + 5u);
}

TEST(Basis, SingleExcitationLabels) {
  const auto b = BasisDescriptor::single_excitation(2, 4);
  EXPECT_EQ(b.bath_dim(), 5u);
  EXPECT_EQ(b.n_max(), 1u);
  EXPECT_EQ(b.occupation(0, 2), 0u);
  EXPECT_EQ(b.occupation(3, 2), 1u);
  EXPECT_EQ(b.occupation(3, 1), 0u);
}

TEST(Ladder, LowerOnVacuumVanishes) {
  const auto r = apply_bath_ladder(single_mode(3, 0, 1.0), 0, Ladder::Lower);
  EXPECT_EQ(r.state.amplitudes.norm(), 0.0);
  EXPECT_EQ(r.truncation_loss, 0.0);
}

TEST(Ladder, RaiseCarriesSqrtNPlusOne) {
  const auto r = apply_bath_ladder(single_mode(3, 1, 1.0), 0, Ladder::Raise);
  EXPECT_NEAR(r.state.amplitudes(2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.state.amplitudes.norm(), std::sqrt(2.0), 1e-15);
}

// The loss is the squared norm of the component a^dagger pushes past n_max.
TEST(Ladder, RaiseAtEdgeIsDroppedAndCounted) {
  const auto r = apply_bath_ladder(single_mode(2, 2, Complex(0.6, 0.0)), 0, Ladder::Raise);
  EXPECT_EQ(r.state.amplitudes.norm(), 0.0);
  EXPECT_NEAR(r.truncation_loss, 3.0 * 0.36, 1e-15);
}

TEST(Ladder, SingleExcitationRaiseOutOfSectorNamesMode) {
  const auto basis = BasisDescriptor::single_excitation(2, 3);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  v(static_cast<Eigen::Index>(basis.index(0, 2))) = 1.0;  // one quantum in mode 1
  const StateVector s(basis, v);
  try {
    apply_bath_ladder(s, 2, Ladder::Raise);
    FAIL() << "expected SectorViolation";
  } catch (const SectorViolation& e) {
    EXPECT_EQ(e.mode(), 2u);
  }
  const auto from_vacuum = apply_bath_ladder(StateVector::product_vacuum(basis, oracle::ket(1.0, 0.0)), 1,
                                             Ladder::Raise);
  EXPECT_EQ(from_vacuum.state.amplitudes(static_cast<Eigen::Index>(basis.index(0, 2))), Complex(1.0, 0.0));
}

TEST(Ladder, MatchesDenseMatrixOracle) {
  std::mt19937_64 gen(11);
  const std::size_t sys = 2, modes = 3, n_max = 2;
  const auto basis = BasisDescriptor::dense_fock(sys, modes, n_max);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector psi = oracle::random_state(static_cast<Eigen::Index>(basis.dimension()), gen);
    const StateVector s(basis, psi);
    for (std::size_t k = 0; k < modes; ++k) {
      const CMatrix a = oracle::dense_annihilator(sys, modes, n_max, k);
      const auto lo = apply_bath_ladder(s, k, Ladder::Lower);
      const auto hi = apply_bath_ladder(s, k, Ladder::Raise);
      EXPECT_LT((lo.state.amplitudes - a * psi).norm(), 1e-13);
      EXPECT_LT((hi.state.amplitudes - a.adjoint() * psi).norm(), 1e-13);
    }
  }
}

TEST(Ladder, AdjointnessBelowTruncationEdge) {
  std::mt19937_64 gen(12);
  const auto basis = BasisDescriptor::dense_fock(2, 2, 3);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  for (int trial = 0; trial < 20; ++trial) {
    CVector phi = oracle::random_state(dim, gen);
    CVector psi = oracle::random_state(dim, gen);
    // Keep psi strictly below the edge so a^dagger drops nothing.
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t b = 0; b < basis.bath_dim(); ++b) {
        if (basis.occupation(b, 0) == 3 || basis.occupation(b, 1) == 3) psi(static_cast<Eigen::Index>(basis.index(s, b))) = 0.0;
      }
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const Complex lhs = phi.dot(apply_bath_ladder(StateVector(basis, psi), k, Ladder::Lower).state.amplitudes);
      const Complex rhs = std::conj(psi.dot(apply_bath_ladder(StateVector(basis, phi), k, Ladder::Raise).state.amplitudes));
      EXPECT_LT(std::abs(lhs - rhs), 1e-12);
      const auto raised = apply_bath_ladder(StateVector(basis, psi), k, Ladder::Raise);
      EXPECT_EQ(raised.truncation_loss, 0.0);
    }
  }
}

TEST(PartialTrace, ProductStateGivesSystemProjector) {
  const CVector sys = oracle::ket(Complex(0.6, 0.0), Complex(0.0, 0.8));
  const auto s = StateVector::product_vacuum(BasisDescriptor::dense_fock(2, 2, 3), sys);
  const DensityMatrix rho = partial_trace_bath(s);
  EXPECT_LT((rho.entries() - sys * sys.adjoint()).norm(), 1e-15);
  EXPECT_TRUE(rho.is_physical());
}

TEST(PartialTrace, EntangledPairIsMaximallyMixed) {
  const auto basis = BasisDescriptor::single_excitation(2, 1);
  CVector v = CVector::Zero(4);
  v(static_cast<Eigen::Index>(basis.index(0, 0))) = 1.0 / std::sqrt(2.0);
  v(static_cast<Eigen::Index>(basis.index(1, 1))) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = partial_trace_bath(StateVector(basis, v));
  EXPECT_LT((rho.entries() - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(PartialTrace, RandomStateMatchesDirectSummation) {
  std::mt19937_64 gen(13);
  const auto basis = BasisDescriptor::dense_fock(2, 2, 3);  // dimension 32
  const auto bath = static_cast<Eigen::Index>(basis.bath_dim());
  for (int trial = 0; trial < 10; ++trial) {
    const CVector psi = oracle::random_state(static_cast<Eigen::Index>(basis.dimension()), gen);
    CMatrix direct = CMatrix::Zero(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        for (Eigen::Index b = 0; b < bath; ++b) direct(i, j) += psi(i * bath + b) * std::conj(psi(j * bath + b));
      }
    }
    const DensityMatrix rho = partial_trace_bath(StateVector(basis, psi));
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
    EXPECT_LT((rho.entries() - direct).norm(), 1e-14);
    EXPECT_TRUE(rho.is_physical());
  }
}

TEST(PartialTrace, InvariantUnderModePermutation) {
  std::mt19937_64 gen(14);
  const std::size_t n_max = 2;
  const auto basis = BasisDescriptor::dense_fock(2, 3, n_max);
  const CVector psi = oracle::random_state(static_cast<Eigen::Index>(basis.dimension()), gen);
  // Relabel modes (0,1,2) -> (2,0,1).
  CVector permuted(psi.size());
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t b = 0; b < basis.bath_dim(); ++b) {
      const std::size_t n0 = basis.occupation(b, 0), n1 = basis.occupation(b, 1), n2 = basis.occupation(b, 2);
      const std::size_t target = n2 * basis.stride(0) + n0 * basis.stride(1) + n1 * basis.stride(2);
      permuted(static_cast<Eigen::Index>(basis.index(s, target))) = psi(static_cast<Eigen::Index>(basis.index(s, b)));
    }
  }
  const CMatrix a = partial_trace_bath(StateVector(basis, psi)).entries();
  const CMatrix b = partial_trace_bath(StateVector(basis, permuted)).entries();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PartialTrace, LinearInProjector) {
  std::mt19937_64 gen(15);
  const auto basis = BasisDescriptor::dense_fock(2, 1, 3);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  const CVector u = oracle::random_state(dim, gen);
  const CVector v = oracle::random_state(dim, gen);
  // Orthogonalize v so the mixture of the two projectors has trace 1 when weighted.
  const CVector w = (v - u * u.dot(v)).normalized();
  const CVector plus = (u + w) / std::sqrt(2.0);
  const CVector minus = (u - w) / std::sqrt(2.0);
  const CMatrix lhs = partial_trace_bath(StateVector(basis, plus)).entries() +
                      partial_trace_bath(StateVector(basis, minus)).entries();
  const CMatrix rhs = partial_trace_bath(StateVector(basis, u)).entries() +
                      partial_trace_bath(StateVector(basis, w)).entries();
  EXPECT_LT((lhs - rhs).norm(), 1e-13);
}

TEST(Embed, SingleExcitationIntoDenseFockPreservesReducedState) {
  std::mt19937_64 gen(16);
  const auto se = BasisDescriptor::single_excitation(2, 3);
  const auto dense = BasisDescriptor::dense_fock(2, 3, 1);
  const CVector psi = oracle::random_state(static_cast<Eigen::Index>(se.dimension()), gen);
  const StateVector e = embed(StateVector(se, psi), dense);
  EXPECT_NEAR(e.norm_squared(), 1.0, 1e-14);
  EXPECT_LT((partial_trace_bath(e).entries() - partial_trace_bath(StateVector(se, psi)).entries()).norm(), 1e-14);
  EXPECT_EQ(e.amplitudes(static_cast<Eigen::Index>(dense.index(1, dense.stride(1)))),
            psi(static_cast<Eigen::Index>(se.index(1, 2))));
}

TEST(DensityMatrix, PhysicalityChecks) {
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  EXPECT_FALSE(DensityMatrix(bad).is_physical());
  CMatrix nonherm = 0.5 * CMatrix::Identity(2, 2);
  nonherm(0, 1) = 0.1;
  EXPECT_FALSE(DensityMatrix(nonherm).is_physical());
  EXPECT_TRUE(DensityMatrix(0.5 * CMatrix::Identity(2, 2)).is_physical());
}

}  // namespace
