#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace msgkit::num {

/// Pairwise (cascade) summation: deterministic for a fixed element order and
/// far less cancellation-prone than a running sum on long panel arrays.
[[nodiscard]] inline double pairwise_sum(const std::vector<double>& v) {
  std::function<double(std::size_t, std::size_t)> rec =
      [&](std::size_t lo, std::size_t hi) -> double {
    const std::size_t len = hi - lo;
    if (len == 0) return 0.0;
    if (len <= 8) {
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += v[i];
      return s;
    }
    const std::size_t mid = lo + len / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return rec(0, v.size());
}

/// Composite Simpson rule with `panels` equal subintervals (must be even).
/// Panel contributions are accumulated pairwise so the result does not depend
/// on accumulation order.
template <typename F>
[[nodiscard]] double simpson_uniform(F&& f, double a, double b, int panels) {
  if (panels < 2 || panels % 2 != 0)
    throw std::invalid_argument("simpson_uniform: panels must be even and >= 2");
  const double h = (b - a) / panels;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(panels) + 1);
  terms.push_back(f(a));
  for (int i = 1; i < panels; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    terms.push_back(w * f(a + i * h));
  }
  terms.push_back(f(b));
  return pairwise_sum(terms) * h / 3.0;
}

namespace detail {

template <typename F>
double adaptive_step(F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth, long long& budget) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  budget -= 2;
  if (depth <= 0 || budget <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                       budget) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                       budget);
}

}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
/// Recursion depth is capped, and a global evaluation budget bounds the work
/// even when the integrand never settles (the best estimate so far is returned
/// in that case). Near-integrable endpoint behaviour is expected to be removed
/// by the caller's substitution before reaching this routine.
template <typename F>
[[nodiscard]] double adaptive_simpson(F&& f, double a, double b, double tol,
                                      int max_depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  long long budget = 16'000'000;
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth,
                               budget);
}

/// Counts local maxima of a sampled curve whose rise above both adjacent
/// valleys is at least `prominence_frac` of the curve's global maximum.
/// Consecutive equal samples are merged into one plateau, and the array ends
/// count as valleys, never as maxima.
[[nodiscard]] inline int count_prominent_maxima(const std::vector<double>& y,
                                                double prominence_frac) {
  const std::size_t n = y.size();
  if (n < 3) return 0;
  double gmax = y[0];
  for (double v : y) gmax = std::max(gmax, v);
  if (!(gmax > 0.0)) return 0;

  // Merge plateaus, then classify each interior distinct value.
  std::vector<double> distinct;
  distinct.reserve(n);
  for (double v : y)
    if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
  struct Extremum {
    double value;
    bool is_max;
  };
  std::vector<Extremum> ext;
  ext.push_back({distinct.front(), false});  // ends act as valleys
  for (std::size_t c = 1; c + 1 < distinct.size(); ++c) {
    const bool up_left = distinct[c] > distinct[c - 1];
    const bool up_right = distinct[c + 1] > distinct[c];
    if (up_left && !up_right) ext.push_back({distinct[c], true});
    if (!up_left && up_right) ext.push_back({distinct[c], false});
  }
  ext.push_back({distinct.back(), false});

  int count = 0;
  for (std::size_t e = 1; e + 1 < ext.size(); ++e) {
    if (!ext[e].is_max) continue;
    // nearest valley values on each side
    double left = ext[e].value;
    for (std::size_t l = e; l-- > 0;)
      if (!ext[l].is_max) {
        left = ext[l].value;
        break;
      }
    double right = ext[e].value;
    for (std::size_t r = e + 1; r < ext.size(); ++r)
      if (!ext[r].is_max) {
        right = ext[r].value;
        break;
      }
    const double prom = ext[e].value - std::max(left, right);
    if (prom >= prominence_frac * gmax) ++count;
  }
  return count;
}

/// Bisection on a bracketing interval [lo, hi] (f(lo) and f(hi) of opposite
/// sign) down to interval width `tol`; returns the midpoint of the last bracket.
template <typename F>
[[nodiscard]] double bisect(F&& f, double lo, double hi, double tol = 1e-12,
                            int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: endpoints do not bracket a sign change");
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace msgkit::num
