#include "nmsse/basis.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "nmsse/error.hpp"

namespace nmsse {

SectorViolation::SectorViolation(std::size_t mode)
    : Error("single-excitation sector violated by raising mode " + std::to_string(mode)),
      mode_(mode) {}

namespace {

constexpr std::size_t kMaxDimension =
    static_cast<std::size_t>(std::numeric_limits<Eigen::Index>::max()) / sizeof(Complex);

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kMaxDimension / a) {
    throw DimensionError("basis dimension exceeds the addressable range");
  }
  return a * b;
}

}  // namespace

BasisDescriptor::BasisDescriptor(BathLayout layout, std::size_t system_dim, std::size_t modes,
                                 std::size_t n_max, std::size_t bath_dim)
    : layout_(layout), system_dim_(system_dim), modes_(modes), n_max_(n_max), bath_dim_(bath_dim) {}

BasisDescriptor BasisDescriptor::dense_fock(std::size_t system_dim, std::size_t modes,
                                            std::size_t n_max) {
  if (system_dim == 0) throw DimensionError("system_dim must be positive");
  if (modes == 0) throw DimensionError("bath needs at least one mode");
  if (n_max == 0) throw DimensionError("DenseFock n_max must be >= 1");
  std::size_t bath = 1;
  for (std::size_t k = 0; k < modes; ++k) bath = checked_mul(bath, n_max + 1);
  checked_mul(bath, system_dim);
  return BasisDescriptor(BathLayout::DenseFock, system_dim, modes, n_max, bath);
}

BasisDescriptor BasisDescriptor::single_excitation(std::size_t system_dim, std::size_t modes) {
  if (system_dim == 0) throw DimensionError("system_dim must be positive");
  if (modes == 0) throw DimensionError("bath needs at least one mode");
  if (modes == std::numeric_limits<std::size_t>::max()) {
    throw DimensionError("basis dimension exceeds the addressable range");
  }
  checked_mul(modes + 1, system_dim);
  return BasisDescriptor(BathLayout::SingleExcitation, system_dim, modes, 1, modes + 1);
}

std::size_t BasisDescriptor::stride(std::size_t mode) const noexcept {
  std::size_t s = 1;
  for (std::size_t k = mode + 1; k < modes_; ++k) s *= n_max_ + 1;
  return s;
}

std::size_t BasisDescriptor::occupation(std::size_t bath_label, std::size_t mode) const noexcept {
  if (layout_ == BathLayout::SingleExcitation) return bath_label == mode + 1 ? 1 : 0;
  return (bath_label / stride(mode)) % (n_max_ + 1);
}

BasisDescriptor BasisDescriptor::widened(std::size_t extra) const {
  return dense_fock(system_dim_, modes_, n_max_ + extra);
}

StateVector::StateVector(BasisDescriptor b, CVector amps, double t)
    : basis(std::move(b)), amplitudes(std::move(amps)), time(t) {
  if (static_cast<std::size_t>(amplitudes.size()) != basis.dimension()) {
    throw DimensionError("amplitude count " + std::to_string(amplitudes.size()) +
                         " does not match basis dimension " + std::to_string(basis.dimension()));
  }
}

StateVector StateVector::product_vacuum(const BasisDescriptor& basis, const CVector& system_state,
                                        double time) {
  if (static_cast<std::size_t>(system_state.size()) != basis.system_dim()) {
    throw DimensionError("system state size does not match basis system_dim");
  }
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  for (std::size_t s = 0; s < basis.system_dim(); ++s) {
    amps(static_cast<Eigen::Index>(basis.index(s, 0))) = system_state(static_cast<Eigen::Index>(s));
  }
  return StateVector(basis, std::move(amps), time);
}

double accumulate_bath_ladder(const BasisDescriptor& basis, std::size_t mode, Ladder kind,
                              Complex coef, std::span<const Complex> in, std::span<Complex> out) {
  if (mode >= basis.mode_count()) throw DimensionError("mode index out of range");
  if (in.size() != basis.dimension() || out.size() != basis.dimension()) {
    throw DimensionError("ladder operand size does not match basis");
  }
  const std::size_t bath = basis.bath_dim();
  const std::size_t sys = basis.system_dim();
  double dropped = 0.0;

  if (basis.layout() == BathLayout::SingleExcitation) {
    const std::size_t excited = mode + 1;
    for (std::size_t s = 0; s < sys; ++s) {
      const std::size_t row = s * bath;
      if (kind == Ladder::Lower) {
        out[row] += coef * in[row + excited];
      } else {
        for (std::size_t b = 1; b < bath; ++b) {
          if (in[row + b] != Complex{}) throw SectorViolation(mode);
        }
        out[row + excited] += coef * in[row];
      }
    }
    return 0.0;
  }

  const std::size_t stride = basis.stride(mode);
  const std::size_t levels = basis.n_max() + 1;
  for (std::size_t s = 0; s < sys; ++s) {
    const std::size_t row = s * bath;
    for (std::size_t b = 0; b < bath; ++b) {
      const std::size_t n = (b / stride) % levels;
      const Complex amp = in[row + b];
      if (amp == Complex{}) continue;
      if (kind == Ladder::Lower) {
        if (n == 0) continue;
        out[row + b - stride] += coef * std::sqrt(static_cast<double>(n)) * amp;
      } else if (n == basis.n_max()) {
        dropped += std::norm(coef) * static_cast<double>(n + 1) * std::norm(amp);
      } else {
        out[row + b + stride] += coef * std::sqrt(static_cast<double>(n + 1)) * amp;
      }
    }
  }
  return dropped;
}

LadderResult apply_bath_ladder(const StateVector& state, std::size_t mode, Ladder kind) {
  CVector out = CVector::Zero(state.amplitudes.size());
  const double dropped = accumulate_bath_ladder(
      state.basis, mode, kind, Complex{1.0, 0.0},
      std::span<const Complex>(state.amplitudes.data(), state.basis.dimension()),
      std::span<Complex>(out.data(), state.basis.dimension()));
  return LadderResult{StateVector(state.basis, std::move(out), state.time), dropped};
}

CVector apply_system_operator(const BasisDescriptor& basis, const CMatrix& op, const CVector& amplitudes) {
  const auto sys = static_cast<Eigen::Index>(basis.system_dim());
  const auto bath = static_cast<Eigen::Index>(basis.bath_dim());
  if (op.rows() != sys || op.cols() != sys) throw DimensionError("system operator has wrong shape");
  if (amplitudes.size() != sys * bath) throw DimensionError("state does not match basis");
  // Column s of the (bath x sys) view is the bath wavefunction attached to system level s.
  CVector out(amplitudes.size());
  Eigen::Map<const CMatrix> in_view(amplitudes.data(), bath, sys);
  Eigen::Map<CMatrix> out_view(out.data(), bath, sys);
  out_view.noalias() = in_view * op.transpose();
  return out;
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("density matrix must be square");
}

bool DensityMatrix::is_physical() const {
  if (!is_hermitian(entries_, 1e-10)) return false;
  if (std::abs(entries_.trace() - Complex{1.0, 0.0}) > 1e-8) return false;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(entries_);
  return eig.eigenvalues().minCoeff() >= -1e-8;
}

DensityMatrix partial_trace_bath(const StateVector& state) {
  const auto sys = static_cast<Eigen::Index>(state.basis.system_dim());
  const auto bath = static_cast<Eigen::Index>(state.basis.bath_dim());
  Eigen::Map<const CMatrix> view(state.amplitudes.data(), bath, sys);
  CMatrix rho = view.transpose() * view.conjugate();
  return DensityMatrix(std::move(rho));
}

StateVector embed(const StateVector& state, const BasisDescriptor& target) {
  const BasisDescriptor& src = state.basis;
  if (target.layout() != BathLayout::DenseFock || target.system_dim() != src.system_dim() ||
      target.mode_count() != src.mode_count() || target.n_max() < src.n_max()) {
    throw DimensionError("embedding target must be a DenseFock basis at least as wide");
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(target.dimension()));
  for (std::size_t b = 0; b < src.bath_dim(); ++b) {
    std::size_t label = 0;
    for (std::size_t k = 0; k < src.mode_count(); ++k) {
      label += src.occupation(b, k) * target.stride(k);
    }
    for (std::size_t s = 0; s < src.system_dim(); ++s) {
      out(static_cast<Eigen::Index>(target.index(s, label))) =
          state.amplitudes(static_cast<Eigen::Index>(src.index(s, b)));
    }
  }
  return StateVector(target, std::move(out), state.time);
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nmsse
