#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msgkit/errors.hpp"
#include "msgkit/model.hpp"

namespace msgkit {

/// Small-oscillation mode about a uniform equilibrium:
/// omega^2 = k^2 + d2V/dphi2(phi_n); stable iff omega^2 > 0.
struct DispersionResult {
  double k;
  double omega_sq;
  bool stable;
};

/// Initial-value problem for a perturbed equilibrium on a periodic domain.
/// The grid snaps to n = round(domain_length/dx) cells and the wavenumbers
/// snap to exact domain harmonics; amplitude is capped at 0.1 to stay in the
/// linear regime. A second mode (amplitude2, k2) may be superposed.
struct PerturbationSpec {
  double phi_n = pi;
  double amplitude = 0.01;
  double k = 1.0;
  double domain_length = 2.0 * two_pi;
  double dx = 0.05;
  double dt = 0.02;
  int steps = 200;
  int snapshot_stride = 10;
  double amplitude2 = 0.0;
  double k2 = 0.0;
};

/// One spectral line of a snapshot.
struct ModeAmplitude {
  double k;
  double amplitude;
};

/// Leapfrog evolution output. Snapshots are stored every snapshot_stride steps
/// (plus the final step); mode_amplitudes[i][j] is the amplitude of domain
/// harmonic j at snapshot i, and energies tracks the discrete total energy.
struct EvolutionRecord {
  std::vector<double> x;
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  std::vector<double> wavenumbers;
  std::vector<std::vector<double>> mode_amplitudes;
  std::vector<double> energies;
  double dx_effective;
  double k_effective;
  double k2_effective;
};

[[nodiscard]] inline DispersionResult dispersion(const ModelParams& p,
                                                 double phi_n, double k) {
  if (std::abs(potential_derivative(p, phi_n)) > 1e-8)
    throw NotAFixedPoint("dispersion is defined about an equilibrium; dV/dphi != 0 at phi_n = " +
                         std::to_string(phi_n));
  const double omega_sq = k * k + potential_second_derivative(p, phi_n);
  return {k, omega_sq, omega_sq > 0.0};
}

/// Longest stable wavelength about an unstable equilibrium: modes with
/// wavelength above 2*pi/sqrt(-d2V) grow. Empty for non-negative curvature.
[[nodiscard]] inline std::optional<double> critical_wavelength(const ModelParams& p,
                                                               double phi_n) {
  if (std::abs(potential_derivative(p, phi_n)) > 1e-8)
    throw NotAFixedPoint("critical wavelength is defined about an equilibrium");
  const double f = potential_second_derivative(p, phi_n);
  if (f < 0.0) return two_pi / std::sqrt(-f);
  return std::nullopt;
}

/// Amplitude spectrum of one snapshot: magnitudes of the mean-removed DFT,
/// normalized so a pure A cos(k x) line reports amplitude A at its harmonic.
[[nodiscard]] inline std::vector<ModeAmplitude> mode_spectrum(
    const std::vector<double>& snapshot, double dx) {
  const std::size_t n = snapshot.size();
  if (n < 2 || !(dx > 0.0))
    throw std::invalid_argument("mode_spectrum needs >= 2 samples and dx > 0");
  double mean = 0.0;
  for (double v : snapshot) mean += v;
  mean /= static_cast<double>(n);
  const double length = static_cast<double>(n) * dx;
  std::vector<ModeAmplitude> out;
  out.reserve(n / 2 + 1);
  for (std::size_t j = 0; j <= n / 2; ++j) {
    double re = 0.0, im = 0.0;
    const double base = two_pi * static_cast<double>(j) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = base * static_cast<double>(i);
      const double v = snapshot[i] - mean;
      re += v * std::cos(a);
      im -= v * std::sin(a);
    }
    const double mag = std::hypot(re, im);
    double scale = 2.0 / static_cast<double>(n);
    if (j == 0 || (n % 2 == 0 && j == n / 2)) scale = 1.0 / static_cast<double>(n);
    out.push_back({two_pi * static_cast<double>(j) / length, mag * scale});
  }
  return out;
}

namespace detail {

inline double snap_wavenumber(double k, double length, const char* name) {
  const double m = k * length / two_pi;
  const double rounded = std::round(m);
  if (!(rounded >= 1.0) || std::abs(m - rounded) > 1e-9 * std::max(1.0, std::abs(m)))
    throw std::invalid_argument(std::string(name) +
                                " must fit the periodic domain: k*L/(2*pi) has to "
                                "be a positive integer, got " +
                                std::to_string(m));
  return two_pi * rounded / length;
}

}  // namespace detail

/// Evolves phi_tt = phi_xx - dV/dphi from phi_n + A cos(k x) at rest, with a
/// second-order leapfrog update and periodic boundaries. Throws CflViolation
/// when dt exceeds the 0.5 dx stability margin and BlowUp (with the step
/// index) when the field leaves the perturbative neighbourhood |phi - phi_n| > pi.
[[nodiscard]] inline EvolutionRecord evolve(const ModelParams& p,
                                            const PerturbationSpec& spec) {
  if (std::abs(potential_derivative(p, spec.phi_n)) > 1e-8)
    throw NotAFixedPoint("evolution base point must be an equilibrium");
  if (!(std::abs(spec.amplitude) <= 0.1) || !(std::abs(spec.amplitude2) <= 0.1))
    throw std::invalid_argument("perturbation amplitudes are capped at 0.1");
  if (!(spec.domain_length > 0.0) || !(spec.dx > 0.0))
    throw std::invalid_argument("domain_length and dx must be > 0");
  if (spec.steps < 1 || spec.snapshot_stride < 1)
    throw std::invalid_argument("steps and snapshot_stride must be >= 1");
  const auto n = static_cast<std::size_t>(
      std::llround(spec.domain_length / spec.dx));
  if (n < 8) throw std::invalid_argument("grid must have at least 8 cells");
  const double dx = spec.domain_length / static_cast<double>(n);
  if (!(spec.dt > 0.0) || spec.dt > 0.5 * dx)
    throw CflViolation("dt = " + std::to_string(spec.dt) +
                       " violates the stability margin dt <= 0.5*dx = " +
                       std::to_string(0.5 * dx));
  const double k1 = detail::snap_wavenumber(spec.k, spec.domain_length, "k");
  const double k2 = spec.amplitude2 != 0.0
                        ? detail::snap_wavenumber(spec.k2, spec.domain_length, "k2")
                        : 0.0;

  EvolutionRecord rec;
  rec.dx_effective = dx;
  rec.k_effective = k1;
  rec.k2_effective = k2;
  rec.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) rec.x[i] = dx * static_cast<double>(i);
  for (std::size_t j = 0; j <= n / 2; ++j)
    rec.wavenumbers.push_back(two_pi * static_cast<double>(j) /
                              spec.domain_length);

  std::vector<double> prev(n), cur(n), next(n);
  for (std::size_t i = 0; i < n; ++i)
    prev[i] = spec.phi_n + spec.amplitude * std::cos(k1 * rec.x[i]) +
              spec.amplitude2 * std::cos(k2 * rec.x[i]);

  const double dt = spec.dt;
  const double r = dt * dt / (dx * dx);
  auto accel_phi = [&](const std::vector<double>& f, std::size_t i) {
    const std::size_t ip = i + 1 == n ? 0 : i + 1;
    const std::size_t im = i == 0 ? n - 1 : i - 1;
    return r * (f[ip] - 2.0 * f[i] + f[im]) -
           dt * dt * potential_derivative(p, f[i]);
  };
  // first step from rest: second-order Taylor
  for (std::size_t i = 0; i < n; ++i) cur[i] = prev[i] + 0.5 * accel_phi(prev, i);

  auto energy_of = [&](const std::vector<double>& f,
                       const std::vector<double>& vel) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const double grad = (f[ip] - f[i]) / dx;
      e += 0.5 * vel[i] * vel[i] + 0.5 * grad * grad + potential(p, f[i]);
    }
    return e * dx;
  };

  std::vector<double> vel(n, 0.0);
  auto record_snapshot = [&](int step, const std::vector<double>& f,
                             const std::vector<double>& v) {
    rec.times.push_back(dt * static_cast<double>(step));
    rec.snapshots.push_back(f);
    rec.energies.push_back(energy_of(f, v));
    const auto spec_lines = mode_spectrum(f, dx);
    std::vector<double> amps;
    amps.reserve(spec_lines.size());
    for (const auto& s : spec_lines) amps.push_back(s.amplitude);
    rec.mode_amplitudes.push_back(std::move(amps));
  };
  record_snapshot(0, prev, vel);

  auto check_blowup = [&](const std::vector<double>& f, int step) {
    for (double v : f)
      if (std::abs(v - spec.phi_n) > pi)
        throw BlowUp("field left the perturbative neighbourhood at step " +
                         std::to_string(step),
                     static_cast<std::size_t>(step));
  };
  check_blowup(cur, 1);

  // march to steps+1 so every recorded step has a centred velocity
  for (int s = 1; s <= spec.steps; ++s) {
    for (std::size_t i = 0; i < n; ++i)
      next[i] = 2.0 * cur[i] - prev[i] + accel_phi(cur, i);
    check_blowup(next, s + 1);
    if (s % spec.snapshot_stride == 0 || s == spec.steps) {
      for (std::size_t i = 0; i < n; ++i)
        vel[i] = (next[i] - prev[i]) / (2.0 * dt);
      record_snapshot(s, cur, vel);
    }
    prev.swap(cur);
    cur.swap(next);
  }
  return rec;
}

}  // namespace msgkit
