#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmsse {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (basis, system dimension, arity).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A model or configuration violates a structural requirement.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A ladder action would push nonzero amplitude out of the single-excitation sector.
class SectorViolation : public Error {
 public:
  explicit SectorViolation(std::size_t mode);
  std::size_t mode() const noexcept { return mode_; }

 private:
  std::size_t mode_;
};

/// Modes that cannot be matched into (k, -k) pairs with mirrored detuning.
class PairingError : public Error {
 public:
  explicit PairingError(std::vector<double> offending_detunings);
  const std::vector<double>& offending_detunings() const noexcept { return detunings_; }

 private:
  std::vector<double> detunings_;
};

/// The conditioned-state weight fell below the node floor.
class NodeEncountered : public Error {
 public:
  explicit NodeEncountered(double weight);
  double weight() const noexcept { return weight_; }

 private:
  double weight_;
};

/// Time-integration validity failure (norm drift, truncation loss, step overflow).
class IntegrationFailure : public Error {
 public:
  enum class Reason { NormDrift, TruncationLoss, StepProbability };
  IntegrationFailure(Reason reason, std::size_t step, double value);
  Reason reason() const noexcept { return reason_; }
  std::size_t step() const noexcept { return step_; }
  double value() const noexcept { return value_; }

 private:
  Reason reason_;
  std::size_t step_;
  double value_;
};

/// Current flowing into a state whose probability is numerically zero.
class RateError : public Error {
 public:
  RateError(std::size_t from, std::size_t to, double current, double probability);
};

/// A requested time does not coincide with the stored lattice.
class LatticeError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmsse
