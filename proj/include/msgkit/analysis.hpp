#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msgkit/errors.hpp"
#include "msgkit/fixed_points.hpp"
#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"
#include "msgkit/static_solver.hpp"

namespace msgkit {

/// Oscillation limits of a periodic profile: the nearest roots of V(phi) + P
/// on either side of phi = pi. Mirror images of each other about pi.
struct TurningPair {
  double phi_lo;
  double phi_hi;
};

/// One scan sample of the equation of state.
struct EosPoint {
  double pressure;
  double mean_density;
  int subkinks;
};

/// Energy budget of one soliton of the periodic chain: the energy carried by
/// one half-period transit and the spacing between adjacent solitons.
struct EnergyPoint {
  double pressure;
  double energy;
  double spacing;
  int subkinks;
};

/// Scan output: samples ordered by pressure plus per-point failures that were
/// collected instead of aborting the scan.
struct EosScan {
  struct Failure {
    double pressure;
    std::string reason;
  };
  std::vector<EosPoint> points;
  std::vector<Failure> failures;
};

/// Point of a phase-space loop.
struct PhasePoint {
  double phi;
  double slope;
};

namespace detail {

inline void require_periodic_band(const ModelParams& p, double pressure) {
  const double vpi = potential(p, pi);
  const double septol = pressure_split_tolerance(p);
  if (!(pressure > -vpi) || !(pressure < -septol))
    throw RegimeError("pressure " + std::to_string(pressure) +
                      " is outside the periodic band (-V(pi), 0) = (" +
                      std::to_string(-vpi) + ", 0)");
}

}  // namespace detail

/// Locates the turning points of a periodic profile: the nearest roots of
/// g = V(phi) + P on either side of pi, bisected down to 1e-12 in phi.
///
/// The search proceeds segment by segment between consecutive critical points
/// of the potential, where g is strictly monotone, so a root pair hiding in an
/// arbitrarily narrow dip of V near an interior extremum cannot be stepped
/// over. A pressure that lands exactly on an interior extremum value is a
/// separatrix (the approach to the extremum takes infinite distance) and is
/// rejected.
[[nodiscard]] inline TurningPair turning_points(const ModelParams& p,
                                                double pressure) {
  detail::require_periodic_band(p, pressure);
  auto g = [&](double phi) { return potential(p, phi) + pressure; };
  const auto critical = find_fixed_points(p);  // includes 0, pi and 2*pi

  auto walk = [&](bool upward) {
    double prev = pi;  // g(pi) > 0 inside the periodic band
    auto step_to = [&](double c) -> std::optional<double> {
      const double gc = g(c);
      if (gc == 0.0)
        throw RegimeError("pressure " + std::to_string(pressure) +
                          " grazes the potential extremum at phi = " +
                          std::to_string(c) + ": interior separatrix");
      if (gc < 0.0)
        return upward ? num::bisect(g, prev, c, 1e-12)
                      : num::bisect(g, c, prev, 1e-12);
      prev = c;
      return std::nullopt;
    };
    if (upward) {
      for (const auto& fp : critical)
        if (fp.phi > pi)
          if (const auto root = step_to(fp.phi)) return *root;
    } else {
      for (auto it = critical.rbegin(); it != critical.rend(); ++it)
        if (it->phi < pi)
          if (const auto root = step_to(it->phi)) return *root;
    }
    // unreachable for band pressures: g at the vacua equals P < 0
    throw RegimeError("no turning point beside pi for P = " +
                      std::to_string(pressure));
  };
  return {walk(false), walk(true)};
}

namespace detail {

/// Shared quadrature kernel for the periodic-band integrals. The substitution
/// phi = phi_lo + (phi_hi - phi_lo) sin^2(theta) removes the inverse-sqrt
/// endpoint singularities; near the turning points the integrand argument is
/// rebuilt from the potential slope to avoid cancellation.
struct PeriodicKernel {
  const ModelParams& p;
  double pressure;
  double lo, hi, delta;
  double dlo, dhi;  // |dV/dphi| at the turning points

  PeriodicKernel(const ModelParams& params, double P, const TurningPair& tp)
      : p(params),
        pressure(P),
        lo(tp.phi_lo),
        hi(tp.phi_hi),
        delta(tp.phi_hi - tp.phi_lo),
        dlo(std::max(potential_derivative(params, tp.phi_lo), 1e-300)),
        dhi(std::max(-potential_derivative(params, tp.phi_hi), 1e-300)) {}

  [[nodiscard]] double phi_at(double theta) const {
    const double s = std::sin(theta);
    return lo + delta * s * s;
  }

  /// dphi/dtheta / sqrt(2 (P + V)); finite at both ends.
  [[nodiscard]] double weight(double theta) const {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    if (s < 1e-9) return std::sqrt(2.0 * delta / dlo);
    if (c < 1e-9) return std::sqrt(2.0 * delta / dhi);
    const double s2 = s * s;
    const double c2 = c * c;
    double a = pressure + potential(p, lo + delta * s2);
    if (s2 < 1e-6)
      a = dlo * delta * s2;
    else if (c2 < 1e-6)
      a = dhi * delta * c2;
    if (a <= 0.0) a = 1e-300;
    return delta * 2.0 * s * c / std::sqrt(2.0 * a);
  }
};

struct PeriodicQuadratures {
  TurningPair tp;
  double half_period;
  double energy;
};

inline PeriodicQuadratures periodic_quadratures(const ModelParams& p,
                                                double pressure) {
  const TurningPair tp = turning_points(p, pressure);
  const PeriodicKernel k(p, pressure, tp);
  auto len = [&](double th) { return k.weight(th); };
  auto erg = [&](double th) {
    return (pressure + 2.0 * potential(p, k.phi_at(th))) * k.weight(th);
  };
  const double half_pi = 0.5 * pi;
  const double cl = num::simpson_uniform(len, 0.0, half_pi, 256);
  const double ce = num::simpson_uniform(erg, 0.0, half_pi, 256);
  const double L =
      num::adaptive_simpson(len, 0.0, half_pi, 1e-10 * (1.0 + std::abs(cl)), 44);
  const double E =
      num::adaptive_simpson(erg, 0.0, half_pi, 1e-10 * (1.0 + std::abs(ce)), 44);
  return {tp, L, E};
}

}  // namespace detail

/// Spacing of the periodic chain: the phi quadrature of 1/sqrt(2 (P + V))
/// between the turning points. Diverges as P approaches 0 or an interior
/// separatrix value.
[[nodiscard]] inline double half_period(const ModelParams& p, double pressure) {
  return detail::periodic_quadratures(p, pressure).half_period;
}

[[nodiscard]] inline int count_subkinks(const ModelParams& p, double pressure);

/// Energy carried by one soliton of the periodic chain:
/// quadrature of (P + 2 V)/sqrt(2 (P + V)) between the turning points,
/// bundled with the chain spacing and the subkink count.
[[nodiscard]] inline EnergyPoint energy_per_soliton(const ModelParams& p,
                                                    double pressure) {
  const auto q = detail::periodic_quadratures(p, pressure);
  return {pressure, q.energy, q.half_period, count_subkinks(p, pressure)};
}

/// Mean energy density of the periodic chain, E per soliton over its spacing.
[[nodiscard]] inline EosPoint mean_density(const ModelParams& p, double pressure) {
  const auto q = detail::periodic_quadratures(p, pressure);
  return {pressure, q.energy / q.half_period, count_subkinks(p, pressure)};
}

/// Mean energy density of a step-like profile over one 2*pi field transit.
[[nodiscard]] inline EosPoint mean_density_steplike(const ModelParams& p,
                                                    double pressure) {
  if (!(pressure > pressure_split_tolerance(p)))
    throw RegimeError("step-like densities require P > 0, got " +
                      std::to_string(pressure));
  auto num_f = [&](double phi) {
    return (pressure + 2.0 * potential(p, phi)) /
           std::sqrt(2.0 * (pressure + potential(p, phi)));
  };
  auto den_f = [&](double phi) {
    return 1.0 / std::sqrt(2.0 * (pressure + potential(p, phi)));
  };
  const double cn = num::simpson_uniform(num_f, 0.0, two_pi, 256);
  const double cd = num::simpson_uniform(den_f, 0.0, two_pi, 256);
  const double top = num::adaptive_simpson(num_f, 0.0, two_pi,
                                           1e-10 * (1.0 + std::abs(cn)));
  const double bot = num::adaptive_simpson(den_f, 0.0, two_pi,
                                           1e-10 * (1.0 + std::abs(cd)));
  return {pressure, top / bot, count_subkinks(p, pressure)};
}

/// Counts slope humps of a solution at the given pressure from the first
/// integral alone: slope(phi) = sqrt(2 (P + V)) sampled between the turning
/// points (or across one lattice cell when P >= 0), mirrored about pi so the
/// count respects the potential's reflection symmetry exactly. One hump is the
/// plain kink core and reports zero subkinks.
[[nodiscard]] inline int count_subkinks(const ModelParams& p, double pressure) {
  const double vpi = potential(p, pi);
  const double septol = pressure_split_tolerance(p);
  double lo;
  if (pressure >= -septol) {
    lo = 0.0;  // separatrix and step-like: the cell ends are slope minima
  } else if (pressure > -vpi) {
    lo = turning_points(p, pressure).phi_lo;
  } else {
    throw RegimeError("no static solution below the periodic band, P = " +
                      std::to_string(pressure));
  }
  const int m = 4096 * std::max(1, p.n_harmonic);
  std::vector<double> half(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    const double phi = lo + (pi - lo) * j / m;
    half[static_cast<std::size_t>(j)] =
        std::sqrt(std::max(2.0 * (pressure + potential(p, phi)), 0.0));
  }
  std::vector<double> full(2 * static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    full[static_cast<std::size_t>(j)] = half[static_cast<std::size_t>(j)];
    full[2 * static_cast<std::size_t>(m) - j] = half[static_cast<std::size_t>(j)];
  }
  return detail::subkinks_from_window(full);
}

/// Evaluates the equation of state on the given pressure grid. Pressures where
/// no chain exists (the separatrix itself, or below the band) are collected as
/// failures instead of aborting; output is ordered by pressure.
[[nodiscard]] inline EosScan scan_equation_of_state(const ModelParams& p,
                                                    std::vector<double> pressures) {
  std::sort(pressures.begin(), pressures.end());
  EosScan scan;
  const double septol = pressure_split_tolerance(p);
  for (double P : pressures) {
    try {
      scan.points.push_back(P > septol ? mean_density_steplike(p, P)
                                       : mean_density(p, P));
    } catch (const RegimeError& e) {
      scan.failures.push_back({P, e.what()});
    }
  }
  return scan;
}

/// Closed phase-space loop of a periodic solution: `samples` points along each
/// slope branch, first point equal to the last.
[[nodiscard]] inline std::vector<PhasePoint> phase_portrait(const ModelParams& p,
                                                            double pressure,
                                                            int samples) {
  if (samples < 2) throw std::invalid_argument("phase_portrait needs samples >= 2");
  const TurningPair tp = turning_points(p, pressure);
  const double delta = tp.phi_hi - tp.phi_lo;
  auto slope_at = [&](double phi) {
    return std::sqrt(std::max(2.0 * (pressure + potential(p, phi)), 0.0));
  };
  std::vector<PhasePoint> loop;
  loop.reserve(2 * static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    const double phi = tp.phi_lo + delta * j / (samples - 1);
    loop.push_back({phi, slope_at(phi)});
  }
  for (int j = 1; j <= samples - 1; ++j) {
    const double phi = tp.phi_hi - delta * j / (samples - 1);
    loop.push_back({phi, -slope_at(phi)});
  }
  return loop;
}

/// Half period read off an RK4 trajectory: successive ascending returns to
/// phi = pi, located by linear interpolation, are spaced by one full period.
[[nodiscard]] inline double half_period_from_trajectory(const Trajectory& t) {
  if (t.classification.kind != SolutionKind::periodic)
    throw RegimeError("period extraction needs a periodic trajectory");
  std::vector<double> crossings;
  const auto& st = t.states;
  for (std::size_t i = 1; i < st.size(); ++i) {
    const double a = st[i - 1].phi - pi;
    const double b = st[i].phi - pi;
    if (a < 0.0 && b >= 0.0) {
      const double frac = a / (a - b);
      crossings.push_back(st[i - 1].x + frac * (st[i].x - st[i - 1].x));
    }
  }
  if (crossings.size() < 2)
    throw RegimeError("trajectory spans less than one full period");
  return 0.5 * (crossings.back() - crossings.front()) /
         static_cast<double>(crossings.size() - 1);
}

}  // namespace msgkit
