#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace msgkit {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Couplings of the multiple-sine-Gordon family
///   V(phi) = 1 + eps - cos(phi) - eps*cos(n*phi).
/// n = 1 is the sine-Gordon model, n = 2 the double sine-Gordon model.
struct ModelParams {
  int n_harmonic;
  double epsilon;

  ModelParams(int n, double eps) : n_harmonic(n), epsilon(eps) {
    if (n < 1)
      throw std::invalid_argument("n_harmonic must be a positive integer, got " +
                                  std::to_string(n));
    if (!(eps >= 0.0) || !std::isfinite(eps))
      throw std::invalid_argument("epsilon must be finite and >= 0, got " +
                                  std::to_string(eps));
  }
};

/// Point on a static profile: position, field value and spatial slope dphi/dx.
struct FieldState {
  double x;
  double phi;
  double slope;
};

/// Diagonal of the stress tensor for a static profile sample:
/// rho = slope^2/2 + V (energy density), pressure = slope^2/2 - V.
struct StressSample {
  double rho;
  double pressure;
};

/// Field potential; >= 0 everywhere, vanishing exactly at phi = 2*pi*m.
[[nodiscard]] inline double potential(const ModelParams& p, double phi) {
  return (1.0 + p.epsilon) - std::cos(phi) -
         p.epsilon * std::cos(p.n_harmonic * phi);
}

/// dV/dphi = sin(phi) + n*eps*sin(n*phi).
[[nodiscard]] inline double potential_derivative(const ModelParams& p, double phi) {
  return std::sin(phi) + p.n_harmonic * p.epsilon * std::sin(p.n_harmonic * phi);
}

/// d2V/dphi2 = cos(phi) + n^2*eps*cos(n*phi).
[[nodiscard]] inline double potential_second_derivative(const ModelParams& p,
                                                        double phi) {
  const double n = p.n_harmonic;
  return std::cos(phi) + n * n * p.epsilon * std::cos(p.n_harmonic * phi);
}

/// Stress-tensor diagonal at a profile point. The pressure component is the
/// first integral of the static equation and is constant along exact solutions.
[[nodiscard]] inline StressSample stress(const ModelParams& p, const FieldState& s) {
  const double kinetic = 0.5 * s.slope * s.slope;
  const double v = potential(p, s.phi);
  return {kinetic + v, kinetic - v};
}

/// Winding number carried by a profile connecting phi_left to phi_right.
[[nodiscard]] inline double topological_charge(double phi_left, double phi_right) {
  return (phi_right - phi_left) / two_pi;
}

}  // namespace msgkit
