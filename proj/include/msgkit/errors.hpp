#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msgkit {

/// Requested operation is only defined in a different solution regime
/// (e.g. a periodic-band quadrature asked for a step-like pressure).
class RegimeError : public std::runtime_error {
 public:
  explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

/// The first integral drifted beyond the configured tolerance along a trajectory.
class ConservationViolation : public std::runtime_error {
 public:
  ConservationViolation(const std::string& what, double drift)
      : std::runtime_error(what), drift_(drift) {}
  [[nodiscard]] double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// Separatrix shooting lost monotonicity (slope changed sign); the step is too
/// coarse to stay on the connecting orbit.
class NonMonotone : public std::runtime_error {
 public:
  explicit NonMonotone(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of the requested map.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A value claimed to be an equilibrium fails the residual check.
class NotAFixedPoint : public std::runtime_error {
 public:
  explicit NotAFixedPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Time step violates the stability margin of the explicit wave update.
class CflViolation : public std::runtime_error {
 public:
  explicit CflViolation(const std::string& what) : std::runtime_error(what) {}
};

/// The evolved field left the perturbative neighbourhood of the base point.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace msgkit
