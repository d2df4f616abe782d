#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"

namespace msgkit {

/// A 2*pi-periodic test function given by one period on [0, 2*pi].
/// Admissible inputs vanish at both interval ends (within 1e-9): the basis
/// below is built from potentials that all vanish at phi = 0.
struct PeriodicFunction {
  std::function<double(double)> evaluator;
  std::string label;
};

/// Basis element F^eps_n(phi) = 1 + eps - cos(phi) - eps*cos(n*phi), n >= 0.
/// Note F_0 = (1 - cos phi) = F_1/(1+eps): the first two elements are
/// proportional, so expansions fix the redundant split by convention (a_0 -> 0).
[[nodiscard]] inline double basis_function(int n, double eps, double phi) {
  if (n < 0) throw std::invalid_argument("basis_function: n must be >= 0");
  return (1.0 + eps) - std::cos(phi) - eps * std::cos(n * phi);
}

/// Result of projecting a periodic function on the model-potential basis.
struct ExpansionResult {
  std::vector<double> fourier_coeffs;   ///< b_0..b_M of the cosine series
  std::vector<double> msg_coeffs;       ///< a_0..a_M in the F^eps_n basis
  double coeff_sum;                     ///< sum of msg coefficients, from the mean of f
  double epsilon;
  int truncation;
  double boundary_residual;             ///< sum of fourier_coeffs; ~0 when f(0)=0 is resolved
  bool boundary_ok;                     ///< |boundary_residual| <= 1e-3
  bool truncation_warning;              ///< |a_M| has not decayed below 1e-6 * max |a|
  double max_reconstruction_error;      ///< max |f - sum a_n F_n| on a 1024-point grid
};

namespace detail {

inline void check_boundary(const PeriodicFunction& f) {
  const double f0 = f.evaluator(0.0);
  const double f1 = f.evaluator(two_pi);
  if (std::abs(f0) > 1e-9 || std::abs(f1) > 1e-9)
    throw std::invalid_argument(
        "periodic function must vanish at 0 and 2*pi (got f(0)=" +
        std::to_string(f0) + ", f(2*pi)=" + std::to_string(f1) + ")");
}

/// Panel count scales with the highest requested harmonic so the quadrature
/// keeps ~64 nodes per oscillation of cos(M*phi).
inline int fourier_panels(int truncation) {
  int p = std::max(4096, 64 * (truncation + 1));
  if (p % 2 != 0) ++p;
  return p;
}

}  // namespace detail

/// Cosine-series front end: b_0 = mean of f, b_n = (1/pi) * integral of
/// f(phi)*cos(n*phi) over one period, n = 1..truncation.
[[nodiscard]] inline std::vector<double> fourier_cosine_coefficients(
    const PeriodicFunction& f, int truncation) {
  if (truncation < 1)
    throw std::invalid_argument("fourier_cosine_coefficients: truncation must be >= 1");
  detail::check_boundary(f);
  const int panels = detail::fourier_panels(truncation);
  std::vector<double> b(static_cast<std::size_t>(truncation) + 1);
  b[0] = num::simpson_uniform([&](double phi) { return f.evaluator(phi); }, 0.0,
                              two_pi, panels) /
         two_pi;
  for (int n = 1; n <= truncation; ++n) {
    b[static_cast<std::size_t>(n)] =
        num::simpson_uniform(
            [&](double phi) { return f.evaluator(phi) * std::cos(n * phi); }, 0.0,
            two_pi, panels) /
        pi;
  }
  return b;
}

/// Inverts the cosine series into the F^eps_n basis. The coefficient sum comes
/// from the mean of f alone; the n = 0 and n = 1 coefficients then follow from
/// the constant and cos(phi) components, and every higher coefficient is a
/// plain rescaling a_n = -b_n/eps. eps = 0 is rejected: the basis degenerates
/// to a single function there and the inversion has no unique solution.
[[nodiscard]] inline ExpansionResult expand_in_msg_basis(const PeriodicFunction& f,
                                                         double eps,
                                                         int truncation) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("expand_in_msg_basis: eps must be finite and > 0");
  ExpansionResult r;
  r.epsilon = eps;
  r.truncation = truncation;
  r.fourier_coeffs = fourier_cosine_coefficients(f, truncation);
  const auto& b = r.fourier_coeffs;

  const int panels = detail::fourier_panels(truncation);
  const double integral_f = num::simpson_uniform(
      [&](double phi) { return f.evaluator(phi); }, 0.0, two_pi, panels);
  r.coeff_sum = integral_f / (two_pi * (1.0 + eps));

  r.msg_coeffs.resize(b.size());
  r.msg_coeffs[0] = ((1.0 + eps) * r.coeff_sum - b[0]) / eps;
  r.msg_coeffs[1] = -(r.coeff_sum + b[1]) / eps;
  for (std::size_t n = 2; n < b.size(); ++n) r.msg_coeffs[n] = -b[n] / eps;

  r.boundary_residual = num::pairwise_sum(r.fourier_coeffs);
  r.boundary_ok = std::abs(r.boundary_residual) <= 1e-3;

  double max_a = 0.0;
  for (double a : r.msg_coeffs) max_a = std::max(max_a, std::abs(a));
  r.truncation_warning =
      max_a > 0.0 && std::abs(r.msg_coeffs.back()) > 1e-6 * max_a;

  double max_err = 0.0;
  for (int i = 0; i <= 1024; ++i) {
    const double phi = two_pi * i / 1024.0;
    double rec = 0.0;
    for (std::size_t n = 0; n < r.msg_coeffs.size(); ++n)
      rec += r.msg_coeffs[n] * basis_function(static_cast<int>(n), eps, phi);
    max_err = std::max(max_err, std::abs(f.evaluator(phi) - rec));
  }
  r.max_reconstruction_error = max_err;
  return r;
}

/// Synthesizes sum a_n F^eps_n as a callable; useful for round-trip checks.
[[nodiscard]] inline PeriodicFunction synthesize_from_msg_coeffs(
    std::vector<double> coeffs, double eps, std::string label = "synthesized") {
  return {[coeffs = std::move(coeffs), eps](double phi) {
            double s = 0.0;
            for (std::size_t n = 0; n < coeffs.size(); ++n)
              s += coeffs[n] * basis_function(static_cast<int>(n), eps, phi);
            return s;
          },
          std::move(label)};
}

/// Triangle wave: phi on [0, pi], reflected on [pi, 2*pi]. Its cosine series
/// has mean pi/2 and harmonics -4/(pi n^2) for odd n only. (A full-amplitude
/// convention would double those harmonics; this implementation keeps the
/// mean-value convention, which is the one the inversion formulas assume.)
[[nodiscard]] inline PeriodicFunction make_triangle_wave() {
  return {[](double phi) {
            const double u = std::fmod(std::abs(phi), two_pi);
            return u <= pi ? u : two_pi - u;
          },
          "triangle"};
}

/// Raised-cosine (Hann) bump of the given width centred inside (0, 2*pi).
[[nodiscard]] inline PeriodicFunction make_raised_cosine(double center = pi,
                                                         double width = pi) {
  if (!(width > 0.0) || center - 0.5 * width < 0.0 || center + 0.5 * width > two_pi)
    throw std::invalid_argument(
        "raised cosine support must lie inside (0, 2*pi)");
  return {[center, width](double phi) {
            const double d = std::abs(phi - center);
            if (d >= 0.5 * width) return 0.0;
            return 0.5 * (1.0 + std::cos(two_pi * d / width));
          },
          "raised-cosine"};
}

}  // namespace msgkit
