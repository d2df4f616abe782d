#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "msgkit/static_solver.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace msgkit;

TEST_CASE("solution kind names", "[static_solver]") {
  CHECK(std::string(to_string(SolutionKind::step_like)) == "step_like");
  CHECK(std::string(to_string(SolutionKind::periodic)) == "periodic");
  CHECK(std::string(to_string(SolutionKind::separatrix_kink)) == "separatrix_kink");
}

TEST_CASE("pressure split tolerance scales with the barrier", "[static_solver]") {
  CHECK_THAT(pressure_split_tolerance(ModelParams(1, 0.0)), WithinRel(3e-12, 1e-12));
  CHECK_THAT(pressure_split_tolerance(ModelParams(3, 10.0)), WithinRel(2.3e-11, 1e-12));
}

TEST_CASE("RK4 holds an equilibrium", "[static_solver]") {
  const ModelParams p(2, 0.1);
  FieldState s{0.0, pi, 0.0};
  for (int i = 0; i < 100; ++i) s = rk4_step(p, s, 1e-3);
  CHECK_THAT(s.phi, WithinAbs(pi, 1e-12));
  CHECK_THAT(s.slope, WithinAbs(0.0, 1e-12));
}

TEST_CASE("single-cosine separatrix matches the closed form", "[static_solver]") {
  const ModelParams p(1, 0.0);
  const auto t = integrate(p, 2.0);  // P = 0.5*4 - 2 = 0 exactly
  CHECK(t.classification.kind == SolutionKind::separatrix_kink);
  CHECK_FALSE(t.classification.subkinks.has_value());
  CHECK(t.pressure == 0.0);
  CHECK_FALSE(t.mirrored);
  for (std::size_t i = 0; i < t.states.size(); i += 997) {
    const auto& s = t.states[i];
    const double exact = 4.0 * std::atan(std::exp(s.x));
    // past this point the exponential instability of the connecting orbit
    // amplifies the integrator's tiny off-separatrix drift
    if (two_pi - exact < 1e-5) break;
    CHECK_THAT(s.phi, WithinAbs(exact, 1e-7));
  }
}

TEST_CASE("launch slope fixes the regime", "[static_solver]") {
  const ModelParams p(2, 0.1);  // barrier V(pi) = 2
  CHECK(integrate(p, std::sqrt(6.0), {1e-3, 10.0, 1e-6}).classification.kind ==
        SolutionKind::step_like);
  CHECK(integrate(p, std::sqrt(2.0), {1e-3, 10.0, 1e-6}).classification.kind ==
        SolutionKind::periodic);
  CHECK(integrate(p, 2.0, {1e-3, 10.0, 1e-6}).classification.kind ==
        SolutionKind::separatrix_kink);
  CHECK_THROWS_AS(integrate(p, 0.0), RegimeError);
  CHECK_THROWS_AS(integrate(p, std::nan("")), std::invalid_argument);
}

TEST_CASE("solver configuration is validated", "[static_solver]") {
  const ModelParams p(1, 0.0);
  CHECK_THROWS_AS(integrate(p, 1.0, {-1e-3, 10.0, 1e-6}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(p, 1.0, {1e-3, 1e-4, 1e-6}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(p, 1.0, {1e-3, 10.0, 0.0}), std::invalid_argument);
}

TEST_CASE("negative launch slopes run mirrored", "[static_solver]") {
  const ModelParams p(3, 10.0);
  const SolverConfig cfg{1e-3, 5.0, 1e-6};
  const auto fwd = integrate(p, 6.5, cfg);
  const auto rev = integrate(p, -6.5, cfg);
  CHECK(rev.mirrored);
  CHECK(rev.pressure == fwd.pressure);
  REQUIRE(rev.states.size() == fwd.states.size());
  for (std::size_t i = 0; i < fwd.states.size(); i += 313) {
    CHECK(rev.states[i].phi == two_pi - fwd.states[i].phi);
    CHECK(rev.states[i].slope == -fwd.states[i].slope);
  }
}

TEST_CASE("first-integral drift is tracked and bounded", "[static_solver]") {
  const ModelParams p(3, 10.0);
  const auto t = integrate(p, 6.5, {1e-3, 30.0, 1e-6});  // P = -0.875
  CHECK_THAT(t.pressure, WithinRel(-0.875, 1e-12));
  CHECK(t.classification.kind == SolutionKind::periodic);
  REQUIRE(t.classification.subkinks.has_value());
  CHECK(*t.classification.subkinks == 3);
  CHECK(t.max_drift > 0.0);
  CHECK(t.max_drift <= 1e-6);
  CHECK(t.states.size() == 30001);
  CHECK_THAT(t.states[1].x - t.states[0].x, WithinAbs(1e-3, 1e-15));
}

TEST_CASE("drift beyond tolerance aborts the run", "[static_solver]") {
  const ModelParams p(1, 0.0);
  CHECK_THROWS_AS(integrate(p, 1.0, {1e-2, 50.0, 1e-12}), ConservationViolation);
  try {
    (void)integrate(p, 1.0, {1e-2, 50.0, 1e-12});
  } catch (const ConservationViolation& e) {
    CHECK(e.drift() > 1e-12);
  }
}

TEST_CASE("subkinks stay unset when the window is too short", "[static_solver]") {
  const ModelParams p(1, 0.0);
  const auto t = integrate(p, std::sqrt(2.0), {1e-3, 1.0, 1e-6});
  CHECK(t.classification.kind == SolutionKind::periodic);
  CHECK_FALSE(t.classification.subkinks.has_value());
}

TEST_CASE("step-like lattice cells carry the subkink pattern", "[static_solver]") {
  const ModelParams p(3, 10.0);
  const auto t = integrate(p, std::sqrt(45.0), {1e-3, 30.0, 1e-6});  // P = +0.5
  CHECK(t.classification.kind == SolutionKind::step_like);
  REQUIRE(t.classification.subkinks.has_value());
  CHECK(*t.classification.subkinks == 3);
}

TEST_CASE("kink profile and quadrature agree on the rest energy",
          "[static_solver]") {
  for (int n : {1, 2, 3}) {
    for (double eps : {0.0, 1.0}) {
      const ModelParams p(n, eps);
      const auto profile = kink_profile(p);
      const double ref = kink_energy_quadrature(p);
      CAPTURE(n, eps);
      CHECK_THAT(profile.energy, WithinRel(ref, 1e-4));
      CHECK(profile.charge == 1);
      CHECK(profile.center == 0.0);
      CHECK(profile.states.front().phi <= 1.1e-6);
      CHECK(two_pi - profile.states.back().phi <= 1.1e-6);
    }
  }
}

TEST_CASE("single-cosine kink energy and shape", "[static_solver]") {
  const auto profile = kink_profile(ModelParams(1, 0.0));
  CHECK_THAT(profile.energy, WithinAbs(8.0, 1e-9));
  CHECK(profile.subkinks == 0);
  double max_err = 0.0;
  for (const auto& s : profile.states)
    max_err = std::max(max_err, std::abs(s.phi - 4.0 * std::atan(std::exp(s.x))));
  CHECK(max_err < 1e-6);
}

TEST_CASE("kink substructure by harmonic", "[static_solver]") {
  CHECK(kink_profile(ModelParams(2, 0.1)).subkinks == 0);
  CHECK(kink_profile(ModelParams(2, 10.0)).subkinks == 2);
  CHECK(kink_profile(ModelParams(3, 10.0)).subkinks == 3);
  CHECK(kink_profile(ModelParams(4, 10.0)).subkinks == 4);
}

TEST_CASE("kink position quadrature", "[static_solver]") {
  const ModelParams sg(1, 0.0);
  CHECK(kink_position_quadrature(sg, pi) == 0.0);
  // closed form x(phi) = ln tan(phi/4)
  CHECK_THAT(kink_position_quadrature(sg, pi / 2.0),
             WithinAbs(std::log(std::tan(pi / 8.0)), 1e-8));
  CHECK_THAT(kink_position_quadrature(sg, 3.0 * pi / 2.0),
             WithinAbs(-std::log(std::tan(pi / 8.0)), 1e-8));
  CHECK_THAT(kink_position_quadrature(sg, 5.0),
             WithinAbs(std::log(std::tan(1.25)), 1e-8));

  const ModelParams p(3, 10.0);
  CHECK_THAT(kink_position_quadrature(p, 1.0) + kink_position_quadrature(p, two_pi - 1.0),
             WithinAbs(0.0, 1e-8));

  CHECK(kink_position_quadrature(p, 1e-13) ==
        -std::numeric_limits<double>::infinity());
  CHECK(kink_position_quadrature(p, two_pi - 1e-13) ==
        std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(kink_position_quadrature(p, 0.0), DomainError);
  CHECK_THROWS_AS(kink_position_quadrature(p, -0.5), DomainError);
  CHECK_THROWS_AS(kink_position_quadrature(p, two_pi), DomainError);
  CHECK_THROWS_AS(kink_position_quadrature(p, 7.0), DomainError);
}
