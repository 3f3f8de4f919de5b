#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pnsguard {

/// Base for failures of a numerical procedure. `quantity()` names the value
/// that could not be computed so the CLI can report it.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string quantity, const std::string& what)
      : std::runtime_error(what), quantity_(std::move(quantity)) {}

  const std::string& quantity() const noexcept { return quantity_; }

 private:
  std::string quantity_;
};

/// The mean-photon-number fixed point did not converge or left [0, 3].
class NonConvergent : public NumericalError {
  using NumericalError::NumericalError;
};

/// Source parameters produce a negative vacuum probability.
class InvalidDistribution : public NumericalError {
  using NumericalError::NumericalError;
};

/// A normalized correlation was requested for a (near) zero mean.
class DegenerateMean : public NumericalError {
  using NumericalError::NumericalError;
};

/// Total gain is zero, so QBER and rates are undefined.
class DegenerateGain : public NumericalError {
  using NumericalError::NumericalError;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public NumericalError {
  using NumericalError::NumericalError;
};

/// Every side peak of the coincidence histogram is empty.
class InsufficientCoincidences : public NumericalError {
  using NumericalError::NumericalError;
};

/// Reference g2 for attack detection is not positive.
class DegenerateReference : public NumericalError {
  using NumericalError::NumericalError;
};

/// A link budget factor is zero so the waiting time is unbounded.
class InfeasibleLink : public NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace pnsguard
