#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msgkit/errors.hpp"
#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"

namespace msgkit {

/// Fixed-step integrator settings. The defaults keep the first-integral drift
/// below 1e-6 across the supported coupling ranges.
struct SolverConfig {
  double step = 1e-3;
  double x_max = 200.0;
  double conservation_tol = 1e-6;
};

enum class SolutionKind { step_like, periodic, separatrix_kink };

[[nodiscard]] inline const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::step_like: return "step_like";
    case SolutionKind::periodic: return "periodic";
    default: return "separatrix_kink";
  }
}

/// Classification of a profile launched from phi(0) = pi, decided by the sign
/// of the first integral P: P > 0 step-like, P = 0 the connecting kink,
/// -V(pi) < P < 0 periodic. Subkink counts need at least one full period (or
/// lattice cell) inside [0, x_max]; otherwise they stay unset.
struct SolutionClass {
  SolutionKind kind;
  std::optional<int> subkinks;
};

/// RK4 samples of a static profile, one state per step, plus diagnostics.
struct Trajectory {
  ModelParams params;
  std::vector<FieldState> states;
  double pressure;
  SolutionClass classification;
  double max_drift;   ///< max |P(x) - P(0)| observed along the run
  bool mirrored;      ///< launch slope was negative; states are the reflected run
};

/// Two-sided kink profile on the P = 0 separatrix, sampled uniformly in x and
/// truncated where the field is within 1e-6 of a vacuum.
struct KinkProfile {
  ModelParams params;
  double center;  ///< zero by construction; the profile is symmetric about it
  std::vector<FieldState> states;
  double energy;
  int charge;
  int subkinks;
};

/// Splitting tolerance between the periodic band, the separatrix and the
/// step-like regime, scaled to the pressure magnitudes in play.
[[nodiscard]] inline double pressure_split_tolerance(const ModelParams& p) {
  return 1e-12 * (1.0 + potential(p, pi));
}

/// One classical RK4 step of phi' = slope, slope' = dV/dphi.
[[nodiscard]] inline FieldState rk4_step(const ModelParams& p, const FieldState& s,
                                         double h) {
  const double k1p = s.slope;
  const double k1s = potential_derivative(p, s.phi);
  const double k2p = s.slope + 0.5 * h * k1s;
  const double k2s = potential_derivative(p, s.phi + 0.5 * h * k1p);
  const double k3p = s.slope + 0.5 * h * k2s;
  const double k3s = potential_derivative(p, s.phi + 0.5 * h * k2p);
  const double k4p = s.slope + h * k3s;
  const double k4s = potential_derivative(p, s.phi + h * k3p);
  return {s.x + h, s.phi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
          s.slope + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)};
}

namespace detail {

inline void validate(const SolverConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step))
    throw std::invalid_argument("solver step must be finite and > 0");
  if (!(cfg.x_max >= cfg.step) || !std::isfinite(cfg.x_max))
    throw std::invalid_argument("x_max must be finite and >= step");
  if (!(cfg.conservation_tol > 0.0))
    throw std::invalid_argument("conservation_tol must be > 0");
}

/// Subkink count over one sampled window of |slope|; a single hump means a
/// plain kink core, reported as zero subkinks.
inline int subkinks_from_window(const std::vector<double>& window) {
  const int cnt = num::count_prominent_maxima(window, 0.01);
  return cnt == 1 ? 0 : cnt;
}

inline std::optional<int> trajectory_subkinks(const std::vector<FieldState>& st,
                                              SolutionKind kind) {
  if (kind == SolutionKind::separatrix_kink) return std::nullopt;
  if (kind == SolutionKind::periodic) {
    // one full transit lies between the first two slope reversals
    std::vector<std::size_t> turns;
    for (std::size_t i = 1; i < st.size() && turns.size() < 2; ++i)
      if (st[i - 1].slope * st[i].slope < 0.0) turns.push_back(i);
    if (turns.size() < 2) return std::nullopt;
    std::vector<double> window;
    window.reserve(turns[1] - turns[0] + 1);
    for (std::size_t i = turns[0]; i <= turns[1]; ++i)
      window.push_back(std::abs(st[i].slope));
    return subkinks_from_window(window);
  }
  // step-like: one lattice cell between successive vacua, where slope is minimal
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (i1 == 0 && st[i].phi >= two_pi) i1 = i;
    if (st[i].phi >= 2.0 * two_pi) {
      i2 = i;
      break;
    }
  }
  if (i2 == 0) return std::nullopt;
  std::vector<double> window;
  window.reserve(i2 - i1 + 1);
  for (std::size_t i = i1; i <= i2; ++i) window.push_back(st[i].slope);
  return subkinks_from_window(window);
}

}  // namespace detail

/// Integrates a profile launched from (x = 0, phi = pi) with the given slope
/// over [0, x_max]. Negative launch slopes are folded onto positive ones via
/// the reflection phi -> 2*pi - phi and the result is marked `mirrored`.
/// Throws ConservationViolation as soon as the first integral drifts beyond
/// the configured tolerance.
[[nodiscard]] inline Trajectory integrate(const ModelParams& p, double slope0,
                                          const SolverConfig& cfg = {}) {
  detail::validate(cfg);
  if (!std::isfinite(slope0))
    throw std::invalid_argument("launch slope must be finite");
  const bool mirrored = slope0 < 0.0;
  const double s0 = std::abs(slope0);
  const double vpi = potential(p, pi);
  const double septol = pressure_split_tolerance(p);
  const double pressure = 0.5 * s0 * s0 - vpi;
  if (s0 == 0.0)
    throw RegimeError(
        "zero launch slope sits at the equilibrium phi = pi; admissible "
        "pressures satisfy P > -V(pi) = " +
        std::to_string(-vpi));

  SolutionKind kind = SolutionKind::periodic;
  if (pressure > septol)
    kind = SolutionKind::step_like;
  else if (pressure >= -septol)
    kind = SolutionKind::separatrix_kink;

  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.x_max / cfg.step));
  std::vector<FieldState> states;
  states.reserve(n_steps + 1);
  FieldState cur{0.0, pi, s0};
  states.push_back(cur);
  double drift = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    cur = rk4_step(p, cur, cfg.step);
    cur.x = static_cast<double>(i) * cfg.step;
    drift = std::max(drift, std::abs(stress(p, cur).pressure - pressure));
    if (drift > cfg.conservation_tol)
      throw ConservationViolation(
          "first integral drifted to " + std::to_string(drift) + " at x = " +
              std::to_string(cur.x) + "; reduce the step",
          drift);
    states.push_back(cur);
  }

  SolutionClass cls{kind, detail::trajectory_subkinks(states, kind)};
  if (mirrored)
    for (auto& st : states) {
      st.phi = two_pi - st.phi;
      st.slope = -st.slope;
    }
  return {p, std::move(states), pressure, cls, drift, mirrored};
}

namespace detail {

/// Shoots along the P = 0 separatrix in one direction until the field is
/// within `delta` of the vacuum. After every RK4 step the slope is restored
/// from the first integral (slope = sqrt(2 V)); the raw step must still be
/// monotone, otherwise the step size cannot hold the connecting orbit.
inline std::vector<FieldState> shoot_separatrix(const ModelParams& p, double h,
                                                double s0, double delta) {
  std::vector<FieldState> out;
  FieldState cur{0.0, pi, s0};
  out.push_back(cur);
  const double forward = h > 0.0 ? 1.0 : -1.0;
  for (std::size_t i = 1;; ++i) {
    if (i > 100'000'000)
      throw std::runtime_error("kink shooting failed to reach the vacuum");
    FieldState nxt = rk4_step(p, cur, h);
    if (nxt.slope <= 0.0 || forward * (nxt.phi - cur.phi) <= 0.0)
      throw NonMonotone(
          "slope reversed while tracing the kink; re-run with a smaller step");
    nxt.x = static_cast<double>(i) * h;
    nxt.slope = std::sqrt(2.0 * potential(p, nxt.phi));
    out.push_back(nxt);
    if (h > 0.0 && nxt.phi >= two_pi - delta) break;
    if (h < 0.0 && nxt.phi <= delta) break;
    cur = nxt;
  }
  return out;
}

}  // namespace detail

/// Traces the single kink (P = 0) through phi(0) = pi in both directions and
/// assembles the full profile. The energy is a trapezoid sum of the energy
/// density plus the analytic exponential-tail remainder beyond the truncation.
[[nodiscard]] inline KinkProfile kink_profile(const ModelParams& p,
                                              const SolverConfig& cfg = {}) {
  detail::validate(cfg);
  constexpr double delta = 1e-6;
  const double s0 = std::sqrt(2.0 * potential(p, pi));
  auto right = detail::shoot_separatrix(p, cfg.step, s0, delta);
  auto left = detail::shoot_separatrix(p, -cfg.step, s0, delta);

  std::vector<FieldState> states;
  states.reserve(left.size() + right.size() - 1);
  for (auto it = left.rbegin(); it != left.rend(); ++it) states.push_back(*it);
  states.insert(states.end(), right.begin() + 1, right.end());

  std::vector<double> rho(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    rho[i] = stress(p, states[i]).rho;
  double energy = cfg.step * (num::pairwise_sum(rho) -
                              0.5 * (rho.front() + rho.back()));
  const double kappa = std::sqrt(potential_second_derivative(p, 0.0));
  const double dist_l = states.front().phi;
  const double dist_r = two_pi - states.back().phi;
  energy += 0.5 * kappa * (dist_l * dist_l + dist_r * dist_r);

  std::vector<double> slopes(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) slopes[i] = states[i].slope;

  const int charge = static_cast<int>(
      std::lround(topological_charge(states.front().phi, states.back().phi)));
  return {p, 0.0, std::move(states), energy, charge,
          detail::subkinks_from_window(slopes)};
}

/// Kink rest energy by direct quadrature of sqrt(2 V) over one field period.
[[nodiscard]] inline double kink_energy_quadrature(const ModelParams& p) {
  auto f = [&](double phi) { return std::sqrt(2.0 * potential(p, phi)); };
  const double coarse = num::simpson_uniform(f, 0.0, two_pi, 512);
  return num::adaptive_simpson(f, 0.0, two_pi, 1e-10 * (1.0 + std::abs(coarse)));
}

/// Inverse kink profile x(phi) = integral from pi of dpsi / sqrt(2 V(psi)).
/// The map diverges logarithmically at the vacua: values within 1e-12 of the
/// interval ends return the signed infinity, values outside (0, 2*pi) are a
/// domain error.
[[nodiscard]] inline double kink_position_quadrature(const ModelParams& p,
                                                     double phi) {
  if (!(phi > 0.0) || !(phi < two_pi))
    throw DomainError("kink position is defined for phi in (0, 2*pi), got " +
                      std::to_string(phi));
  if (phi <= 1e-12) return -std::numeric_limits<double>::infinity();
  if (phi >= two_pi - 1e-12) return std::numeric_limits<double>::infinity();
  auto f = [&](double psi) { return 1.0 / std::sqrt(2.0 * potential(p, psi)); };
  if (phi >= pi) return num::adaptive_simpson(f, pi, phi, 1e-11, 48);
  return -num::adaptive_simpson(f, phi, pi, 1e-11, 48);
}

}  // namespace msgkit
