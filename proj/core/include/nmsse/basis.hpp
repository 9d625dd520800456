#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace nmsse {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class BathLayout { DenseFock, SingleExcitation };

// Tensor basis system (x) bath. Amplitude index = system_index * bath_dim + bath_label.
//
// DenseFock: bath_label enumerates occupations (n_0, ..., n_{K-1}), each in
// [0, n_max], with mode K-1 varying fastest.
// SingleExcitation: bath_label 0 is the vacuum, label k+1 holds one quantum in
// mode k.
class BasisDescriptor {
 public:
  static BasisDescriptor dense_fock(std::size_t system_dim, std::size_t modes, std::size_t n_max);
  static BasisDescriptor single_excitation(std::size_t system_dim, std::size_t modes);

  BathLayout layout() const noexcept { return layout_; }
  std::size_t system_dim() const noexcept { return system_dim_; }
  std::size_t mode_count() const noexcept { return modes_; }
  // Highest occupation representable per mode (1 for SingleExcitation).
  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t bath_dim() const noexcept { return bath_dim_; }
  std::size_t dimension() const noexcept { return system_dim_ * bath_dim_; }

  std::size_t index(std::size_t system_index, std::size_t bath_label) const noexcept {
    return system_index * bath_dim_ + bath_label;
  }
  std::size_t occupation(std::size_t bath_label, std::size_t mode) const noexcept;
  // DenseFock only: label offset of one quantum in `mode`.
  std::size_t stride(std::size_t mode) const noexcept;

  // Same system/mode structure, n_max raised by `extra` (always DenseFock).
  BasisDescriptor widened(std::size_t extra) const;

  friend bool operator==(const BasisDescriptor&, const BasisDescriptor&) = default;

 private:
  BasisDescriptor(BathLayout layout, std::size_t system_dim, std::size_t modes,
                  std::size_t n_max, std::size_t bath_dim);

  BathLayout layout_;
  std::size_t system_dim_;
  std::size_t modes_;
  std::size_t n_max_;
  std::size_t bath_dim_;
};

struct StateVector {
  StateVector(BasisDescriptor basis, CVector amplitudes, double time = 0.0);

  // |psi_sys> (x) |vac>.
  static StateVector product_vacuum(const BasisDescriptor& basis, const CVector& system_state,
                                    double time = 0.0);

  double norm_squared() const { return amplitudes.squaredNorm(); }

  BasisDescriptor basis;
  CVector amplitudes;
  double time;
};

enum class Ladder { Raise, Lower };

struct LadderResult {
  StateVector state;
  // Squared norm of amplitude raised past n_max and dropped.
  double truncation_loss = 0.0;
};

// a_k|psi> or a_k^dagger|psi> with sqrt(n) elements. Throws SectorViolation when a
// SingleExcitation raise would carry nonzero amplitude out of the sector.
LadderResult apply_bath_ladder(const StateVector& state, std::size_t mode, Ladder kind);

// out += coef * (a_k or a_k^dagger) in. Returns the dropped squared norm (|coef|^2 scaled).
double accumulate_bath_ladder(const BasisDescriptor& basis, std::size_t mode, Ladder kind,
                              Complex coef, std::span<const Complex> in, std::span<Complex> out);

// (op (x) 1_bath) |psi>.
CVector apply_system_operator(const BasisDescriptor& basis, const CMatrix& op, const CVector& amplitudes);

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  const CMatrix& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  Complex operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  Complex trace() const { return entries_.trace(); }

  // Hermitian to 1e-10, trace 1 to 1e-8, eigenvalues >= -1e-8.
  bool is_physical() const;

 private:
  CMatrix entries_;
};

// rho[i][j] = sum_b <i,b|psi><psi|j,b>.
DensityMatrix partial_trace_bath(const StateVector& state);

// Copies a state into a wider DenseFock basis (zero-padding new levels).
StateVector embed(const StateVector& state, const BasisDescriptor& target);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);

}  // namespace nmsse
