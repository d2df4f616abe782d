#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace msgkit;

TEST_CASE("pairwise sum", "[numerics]") {
  CHECK(num::pairwise_sum({}) == 0.0);
  std::vector<double> ints(100);
  std::iota(ints.begin(), ints.end(), 1.0);
  CHECK(num::pairwise_sum(ints) == 5050.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(5000);
  for (double& x : v) x = u(rng);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  CHECK_THAT(num::pairwise_sum(v), WithinAbs(static_cast<double>(ref), 1e-12));
  CHECK(num::pairwise_sum(v) == num::pairwise_sum(v));
}

TEST_CASE("composite Simpson rule", "[numerics]") {
  CHECK_THAT(num::simpson_uniform([](double x) { return std::sin(x); }, 0.0, pi,
                                  256),
             WithinAbs(2.0, 1e-8));
  // Simpson integrates cubics exactly
  CHECK_THAT(num::simpson_uniform([](double x) { return x * x * x; }, 0.0, 1.0, 2),
             WithinAbs(0.25, 1e-15));
  CHECK_THROWS_AS(num::simpson_uniform([](double) { return 1.0; }, 0.0, 1.0, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(num::simpson_uniform([](double) { return 1.0; }, 0.0, 1.0, 0),
                  std::invalid_argument);
}

TEST_CASE("adaptive Simpson rule", "[numerics]") {
  CHECK_THAT(num::adaptive_simpson([](double x) { return 4.0 / (1.0 + x * x); },
                                   0.0, 1.0, 1e-10),
             WithinAbs(pi, 1e-9));
  CHECK_THAT(num::adaptive_simpson([](double x) { return std::cos(x); }, 0.0,
                                   2.0 * pi, 1e-12),
             WithinAbs(0.0, 1e-11));
  // narrow Gaussian: the refinement has to find the spike on its own
  const double needle = num::adaptive_simpson(
      [](double x) { return std::exp(-400.0 * x * x); }, -1.0, 1.0, 1e-12);
  CHECK_THAT(needle, WithinAbs(std::sqrt(std::acos(-1.0) / 400.0), 1e-10));
}

TEST_CASE("prominent maxima counting", "[numerics]") {
  using num::count_prominent_maxima;
  CHECK(count_prominent_maxima({0.0, 1.0, 0.0}, 0.01) == 1);
  CHECK(count_prominent_maxima({0.0, 1.0, 1.0, 1.0, 0.0}, 0.01) == 1);
  CHECK(count_prominent_maxima({0.0, 1.0, 0.1, 1.0, 0.0}, 0.01) == 2);
  // shallow saddle: both humps fail a 10% prominence bar, pass a 1% one
  CHECK(count_prominent_maxima({0.0, 1.0, 0.95, 1.0, 0.0}, 0.1) == 0);
  CHECK(count_prominent_maxima({0.0, 1.0, 0.95, 1.0, 0.0}, 0.01) == 2);
  // array ends are valleys, never maxima
  CHECK(count_prominent_maxima({1.0, 0.0, 1.0}, 0.01) == 0);
  CHECK(count_prominent_maxima({0.0, 1.0, 2.0, 3.0}, 0.01) == 0);
  CHECK(count_prominent_maxima({1.0, 1.0, 1.0}, 0.01) == 0);
  CHECK(count_prominent_maxima({1.0, 2.0}, 0.01) == 0);
  CHECK(count_prominent_maxima({0.0, -1.0, 0.0}, 0.01) == 0);
}

TEST_CASE("bisection", "[numerics]") {
  CHECK_THAT(num::bisect([](double x) { return std::cos(x); }, 0.0, 2.0, 1e-13),
             WithinAbs(0.5 * pi, 1e-12));
  CHECK_THAT(num::bisect([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-13),
             WithinAbs(std::cbrt(2.0), 1e-12));
  // decreasing bracket works too
  CHECK_THAT(num::bisect([](double x) { return 1.0 - x; }, 0.0, 2.0, 1e-13),
             WithinAbs(1.0, 1e-12));
  // exact zeros at the ends are returned as-is
  CHECK(num::bisect([](double x) { return x; }, 0.0, 1.0) == 0.0);
  CHECK(num::bisect([](double x) { return x - 1.0; }, 0.0, 1.0) == 1.0);
  CHECK_THROWS_AS(num::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                  std::invalid_argument);
}
