#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msgkit/errors.hpp"
#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"

namespace msgkit {

enum class FixedPointKind { potential_minimum, potential_maximum, inflection };

/// Equilibrium of the field: a root of dV/dphi with its curvature d2V/dphi2.
struct FixedPoint {
  double phi;
  double curvature;
  FixedPointKind kind;
};

[[nodiscard]] inline const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::potential_minimum: return "potential_minimum";
    case FixedPointKind::potential_maximum: return "potential_maximum";
    default: return "inflection";
  }
}

/// Classifies a known equilibrium by curvature sign; |curvature| <= 1e-10 is
/// degenerate and reported as an inflection.
[[nodiscard]] inline FixedPoint classify_fixed_point(const ModelParams& p,
                                                     double phi) {
  if (std::abs(potential_derivative(p, phi)) > 1e-8)
    throw NotAFixedPoint("dV/dphi does not vanish at phi = " + std::to_string(phi));
  const double curv = potential_second_derivative(p, phi);
  FixedPointKind kind = FixedPointKind::inflection;
  if (curv > 1e-10) kind = FixedPointKind::potential_minimum;
  if (curv < -1e-10) kind = FixedPointKind::potential_maximum;
  return {phi, curv, kind};
}

/// All equilibria in [0, 2*pi], sorted. Roots of dV/dphi are bracketed on a
/// grid of 16 N^2 cells and bisected to 1e-12. Cells where the derivative of
/// dV/dphi reverses are additionally probed at the interior extremum, which
/// resolves root pairs tighter than one cell and flags tangencies (double
/// roots) as inflections. 0, pi and 2*pi are exact roots and always included.
[[nodiscard]] inline std::vector<FixedPoint> find_fixed_points(const ModelParams& p) {
  auto g = [&](double phi) { return potential_derivative(p, phi); };
  auto dg = [&](double phi) { return potential_second_derivative(p, phi); };

  std::vector<double> roots{0.0, pi, two_pi};
  const int cells = std::max(64, 16 * p.n_harmonic * p.n_harmonic);
  auto add_bracket = [&](double a, double b) {
    const double ga = g(a);
    const double gb = g(b);
    if (ga == 0.0) {
      roots.push_back(a);
      return;
    }
    if (gb == 0.0) {
      roots.push_back(b);
      return;
    }
    if ((ga > 0.0) != (gb > 0.0)) roots.push_back(num::bisect(g, a, b, 1e-12));
  };
  for (int i = 0; i < cells; ++i) {
    const double a = two_pi * i / cells;
    const double b = two_pi * (i + 1) / cells;
    const double da = dg(a);
    const double db = dg(b);
    if ((da > 0.0) != (db > 0.0)) {
      // extremum of dV/dphi inside the cell: split the bracket there
      const double e = num::bisect(dg, a, b, 1e-12);
      if (std::abs(g(e)) <= 1e-10)
        roots.push_back(e);  // tangency: double root, classified as inflection
      else {
        add_bracket(a, e);
        add_bracket(e, b);
      }
    } else {
      add_bracket(a, b);
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<FixedPoint> out;
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back().phi) < 1e-7) continue;
    const double curv = potential_second_derivative(p, r);
    FixedPointKind kind = FixedPointKind::inflection;
    if (curv > 1e-10) kind = FixedPointKind::potential_minimum;
    if (curv < -1e-10) kind = FixedPointKind::potential_maximum;
    out.push_back({r, curv, kind});
  }
  return out;
}

/// Equilibria as a function of the coupling epsilon at fixed N. The grid must
/// be non-negative and ascending.
[[nodiscard]] inline std::vector<std::pair<double, std::vector<FixedPoint>>>
bifurcation_scan(int n_harmonic, const std::vector<double>& eps_grid) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i)
    if (eps_grid[i] < 0.0 || (i > 0 && eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("eps_grid must be non-negative and ascending");
  std::vector<std::pair<double, std::vector<FixedPoint>>> out;
  out.reserve(eps_grid.size());
  for (double eps : eps_grid)
    out.emplace_back(eps, find_fixed_points(ModelParams(n_harmonic, eps)));
  return out;
}

}  // namespace msgkit
