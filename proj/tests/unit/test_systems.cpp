#include <doctest.h>

#include <cmath>
#include <vector>

#include "loglaw/errors.hpp"
#include "loglaw/systems.hpp"

using namespace loglaw;

namespace {

AutonomousCircleFamily doubling() { return AutonomousCircleFamily(ExpandingCircleMap(2, 0.0)); }

}  // namespace

TEST_CASE("step examples") {
  auto T = doubling();
  CHECK(T.step(1, circle_point(0.3)).base.value() == doctest::Approx(0.6));
  CHECK(T.step(17, circle_point(0.3)).base.value() == doctest::Approx(0.6));

  SlowFamily slow;
  auto p = slow.step(4, solenoid_point(0.1, 0.9, 0.2));
  CHECK(p.base.value() == doctest::Approx(0.2));
  CHECK(p.fiber.u == 0.5);
  CHECK(p.fiber.v == 0.0);
  CHECK_THROWS_AS(slow.step(0, p), InvalidInput);

  SolenoidFamily sol;
  auto q = sol.step(0, solenoid_point(0.0, 0.0, 0.0));
  CHECK(q.base.value() == 0.0);
  CHECK(q.fiber.u == doctest::Approx(0.5));
  CHECK(q.fiber.v == doctest::Approx(0.0));
  auto far = sol.step(200, solenoid_point(0.0, 0.0, 0.0));
  CHECK(far.fiber.u == doctest::Approx(0.5));
  CHECK(std::fabs(far.fiber.v) < 1e-50);
}

TEST_CASE("expanding map admissibility") {
  CHECK_THROWS_AS(ExpandingCircleMap(1, 0.0), ConfigError);
  CHECK_THROWS_AS(ExpandingCircleMap(2, 0.2), ConfigError);
  ExpandingCircleMap T(2, 0.05);
  double min_derivative = 10.0;
  for (int i = 0; i < 10000; ++i) min_derivative = std::min(min_derivative, T.derivative(i / 1e4));
  CHECK(min_derivative > 1.0);
  CHECK(min_derivative >= T.min_expansion() - 1e-12);
}

TEST_CASE("solenoid admissibility") {
  CHECK_THROWS_AS(SolenoidFamily({2, 1.5, 0.5, 0.1, 0.5}), ConfigError);
  CHECK_THROWS_AS(SolenoidFamily({2, 0.6, 0.5, 0.1, 0.5}), ConfigError);
  CHECK_THROWS_AS(SolenoidFamily({2, 0.25, 0.5, -0.1, 0.5}), ConfigError);
}

TEST_CASE("orbit examples") {
  auto T = doubling();
  auto single = orbit_points(T, circle_point(0.4), 0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].base.value() == 0.4);

  auto pts = orbit_points(T, circle_point(1.0 / 7.0), 3);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].base.value() == doctest::Approx(1.0 / 7.0));
  CHECK(pts[1].base.value() == doctest::Approx(2.0 / 7.0));
  CHECK(pts[2].base.value() == doctest::Approx(4.0 / 7.0));
  CHECK(pts[3].base.value() == doctest::Approx(1.0 / 7.0));

  SlowFamily slow;
  auto s = orbit_points(slow, solenoid_point(0.0, 1.0, 0.0), 2);
  CHECK(s[0].fiber.u == 1.0);
  CHECK(s[1].fiber.u == 1.0);
  CHECK(s[2].fiber.u == doctest::Approx(std::sqrt(0.5)));
  CHECK(s[2].fiber.v == 0.0);
}

TEST_CASE("orbit range is lazy and reproducible") {
  auto T = doubling();
  std::vector<double> a;
  for (const auto& p : orbit(T, circle_point(0.123), 10, {kShadowJitter, 5})) a.push_back(p.base.value());
  std::vector<double> b;
  for (const auto& p : orbit(T, circle_point(0.123), 10, {kShadowJitter, 5})) b.push_back(p.base.value());
  CHECK(a.size() == 11);
  CHECK(a == b);
}

TEST_CASE("jitter keeps doubling orbits away from the zero collapse") {
  auto T = doubling();
  auto plain = orbit_points(T, circle_point(0.1234567), 80);
  CHECK(plain.back().base.value() == 0.0);
  auto jittered = orbit_points(T, circle_point(0.1234567), 80, {kShadowJitter, 1});
  CHECK(jittered.back().base.value() != 0.0);
  // Early points stay within jitter-scale shadowing error of the true orbit.
  CHECK(std::fabs(jittered[10].base.value() - plain[10].base.value()) < 1e-9);
}

TEST_CASE("hitting_time examples") {
  auto T = doubling();
  auto immediate = hitting_time(T, circle_point(0.5), circle_point(0.505), 0.01, 100);
  CHECK(immediate == HitResult{HitResult::Status::hit, 0});

  auto h = hitting_time(T, circle_point(1.0 / 7.0), circle_point(4.0 / 7.0), 0.01, 100);
  CHECK(h == HitResult{HitResult::Status::hit, 2});

  SlowFamily slow;
  auto c = hitting_time(slow, solenoid_point(0.37, 1.0, 0.0), solenoid_point(0.5, 0.0, 0.0), 0.01,
                        1000, {kShadowJitter, 3});
  CHECK(c == HitResult{HitResult::Status::censored, 1000});

  auto big = hitting_time(T, circle_point(0.1), circle_point(0.6), 0.7, 10);
  CHECK(big == HitResult{HitResult::Status::hit, 0});

  CHECK_THROWS_AS(hitting_time(T, circle_point(0.1), circle_point(0.2), 0.0, 10), InvalidInput);
  CHECK_THROWS_AS(hitting_time(T, circle_point(0.1), circle_point(0.2), 0.1, 0), InvalidInput);
}

TEST_CASE("hit results satisfy the first-entrance property") {
  auto T = doubling();
  SplitMix64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    auto x0 = circle_point(uniform01(rng));
    auto y = circle_point(uniform01(rng));
    OrbitOptions opt{kShadowJitter, rng()};
    auto h = hitting_time(T, x0, y, 0.02, 5000, opt);
    REQUIRE(h.hit());
    auto pts = orbit_points(T, x0, h.steps, opt);
    for (std::size_t k = 0; k < h.steps; ++k) CHECK(distance(pts[k].base, y.base) >= 0.02);
    CHECK(distance(pts[h.steps].base, y.base) < 0.02);
  }
}

TEST_CASE("hitting times are monotone in the radius") {
  SolenoidFamily sol;
  SplitMix64 rng(8);
  std::vector<double> radii{0.3, 0.1, 0.03, 0.01};
  for (int trial = 0; trial < 20; ++trial) {
    auto x0 = sample_lebesgue(PhaseSpace::solenoid, rng);
    auto y = sol.step(0, sol.step(0, sample_lebesgue(PhaseSpace::solenoid, rng)));
    auto hits = hitting_times(sol, x0, y, radii, 20000, {kShadowJitter, rng()});
    for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
      double a = hits[k].hit() ? static_cast<double>(hits[k].steps) : INFINITY;
      double b = hits[k + 1].hit() ? static_cast<double>(hits[k + 1].steps) : INFINITY;
      CHECK(a <= b);
    }
  }
}

TEST_CASE("single-radius and multi-radius hitting agree") {
  auto T = doubling();
  std::vector<double> radii{0.001, 0.1, 0.01};
  OrbitOptions opt{kShadowJitter, 77};
  auto many = hitting_times(T, circle_point(0.3), circle_point(0.77), radii, 100000, opt);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(many[k] == hitting_time(T, circle_point(0.3), circle_point(0.77), radii[k], 100000, opt));
  }
}

TEST_CASE("solenoid fibers stay in the unit disc") {
  SolenoidFamily sol;
  SplitMix64 rng(12);
  for (int s = 0; s < 100000; ++s) {
    auto p = sample_lebesgue(PhaseSpace::solenoid, rng);
    auto i = static_cast<std::size_t>(uniform01(rng) * 40);
    CHECK_FALSE(norm(sol.fiber_map(i, p.base.value(), p.fiber)) > 1.0);
  }
}

TEST_CASE("slow family fiber schedule forces quadratic waiting") {
  SlowFamily slow;
  auto target = solenoid_point(0.5, 0.0, 0.0);
  Orbit path(slow, solenoid_point(0.3, 0.2, 0.1));
  for (std::size_t j = 1; j <= 2000; ++j) {
    path.advance();
    CHECK(path.point().fiber.u == 1.0 / std::sqrt(static_cast<double>(j)));
    for (std::size_t i : {2u, 5u, 20u}) {
      if (norm(path.point().fiber - target.fiber) <= 1.0 / static_cast<double>(i)) CHECK(j >= i * i);
    }
  }
}

TEST_CASE("verify_assumptions") {
  SolenoidFamily sol;
  auto report = verify_assumptions(sol, 1000, 1);
  CHECK(report.all_pass());
  CHECK(report.contraction.measured <= 0.25 + 1e-9);
  for (const auto& d : report.decay_samples) {
    if (d.index == 10) CHECK(d.measured <= 0.1 * std::sqrt(2.0) * std::ldexp(1.0, -10));
  }

  SolenoidFamily flat({2, 0.25, 0.5, 0.0, 0.5});
  auto r0 = verify_assumptions(flat, 200, 1);
  for (const auto& d : r0.decay_samples) CHECK(d.measured == 0.0);

  CHECK_THROWS_AS(verify_assumptions(sol, 99), InvalidInput);
}

TEST_CASE("cyclic family") {
  CyclicCircleFamily alt({ExpandingCircleMap(2, 0).as_circle_map(), ExpandingCircleMap(3, 0).as_circle_map()});
  CHECK(alt.step(1, circle_point(0.1)).base.value() == doctest::Approx(0.2));
  CHECK(alt.step(2, circle_point(0.1)).base.value() == doctest::Approx(0.3));
  CHECK(alt.step(3, circle_point(0.1)).base.value() == doctest::Approx(0.2));
  CHECK(alt.base_map_key(1) == alt.base_map_key(3));
  CHECK(alt.base_map_key(2) != alt.base_map_key(3));
  CHECK_THROWS_AS(alt.step(0, circle_point(0.1)), InvalidInput);
}

TEST_CASE("limit families") {
  SolenoidFamily sol;
  auto limit = sol.limit_family();
  REQUIRE(limit);
  auto p = solenoid_point(0.2, 0.1, 0.1);
  CHECK(limit->step(5, p) == sol.step(0, p));
  CHECK(SlowFamily().limit_family()->step(3, p).fiber.u == 0.0);
}
