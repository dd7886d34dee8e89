#include <doctest.h>

#include <cmath>
#include <vector>

#include "loglaw/errors.hpp"
#include "loglaw/measures.hpp"
#include "loglaw/random.hpp"
#include "oracles.hpp"

using namespace loglaw;

TEST_CASE("circle points reduce mod 1") {
  CHECK(CirclePoint(1.25).value() == doctest::Approx(0.25));
  CHECK(CirclePoint(-0.25).value() == doctest::Approx(0.75));
  CHECK(CirclePoint(3.0).value() == 0.0);
  CHECK(circle_distance(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(circle_distance(0.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("solenoid metric is the max of base and fiber distances") {
  auto a = solenoid_point(0.1, 0.0, 0.0);
  auto b = solenoid_point(0.2, 0.3, 0.4);
  CHECK(phase_distance(PhaseSpace::solenoid, a, b) == doctest::Approx(0.5));
  CHECK(phase_distance(PhaseSpace::circle, a, b) == doctest::Approx(0.1));
}

TEST_CASE("lip_norm") {
  std::vector<double> ones(64, 1.0);
  CHECK(lip_norm(ones) == 1.0);
  std::vector<double> zeros(64, 0.0);
  CHECK(lip_norm(zeros) == 0.0);

  std::vector<double> dist(1024);
  for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = circle_distance(0.0, i / 1024.0);
  CHECK(std::fabs(lip_norm(dist) - 1.0) < 2e-3);

  std::vector<double> one{1.0};
  CHECK_THROWS_AS(lip_norm(one), InvalidInput);
  CHECK_THROWS_AS(lip_norm(std::vector<double>{}), InvalidInput);
}

TEST_CASE("lip_norm is a norm on samples") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(32), g(32), sum(32), scaled(32);
    for (std::size_t i = 0; i < 32; ++i) {
      f[i] = uniform01(rng) - 0.5;
      g[i] = uniform01(rng) - 0.5;
      sum[i] = f[i] + g[i];
      scaled[i] = -3.0 * f[i];
    }
    CHECK(lip_norm(sum) <= lip_norm(f) + lip_norm(g) + 1e-12);
    CHECK(lip_norm(scaled) == doctest::Approx(3.0 * lip_norm(f)).epsilon(1e-12));
  }
}

TEST_CASE("w11_norm") {
  CHECK(w11_norm(GridDensity::lebesgue(128)) == doctest::Approx(1.0));
  CHECK(w11_norm(GridDensity(std::vector<double>(128, 0.0))) == 0.0);
  auto f = GridDensity::from_function(4096, [](double x) { return 1 + 0.5 * std::sin(kTwoPi * x); });
  CHECK(std::fabs(w11_norm(f) - 3.0) < 1e-2);

  SplitMix64 rng(5);
  std::vector<double> v(100);
  double l1 = 0.0;
  for (auto& x : v) {
    x = uniform01(rng) - 0.3;
    l1 += std::fabs(x) / 100.0;
  }
  CHECK(w11_norm(GridDensity(v)) >= l1);
}

TEST_CASE("integrate") {
  CHECK(integrate([](double) { return 1.0; }, GridDensity::lebesgue(10)) == doctest::Approx(1.0));
  CHECK(integrate([](double) { return 1.0; }, EmpiricalMeasure::dirac(0.3)) == 1.0);
  CHECK(std::fabs(integrate([](double x) { return x; }, GridDensity::lebesgue(64)) - 0.5) <=
        1.0 / 128.0);
  CHECK(integrate([](double x) { return std::sin(kTwoPi * x); }, EmpiricalMeasure::dirac(0.25)) ==
        doctest::Approx(1.0));
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(GridDensity(std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(GridDensity(std::vector<double>{1.0, NAN}), InvalidInput);
  CHECK_THROWS_AS(EmpiricalMeasure(PhaseSpace::circle, {circle_point(0.1)}, {-1.0}), InvalidInput);
  CHECK_THROWS_AS(EmpiricalMeasure(PhaseSpace::circle, {circle_point(0.1)}, {0.5, 0.5}),
                  InvalidInput);
  CHECK_THROWS_AS(EmpiricalMeasure(PhaseSpace::solenoid, {solenoid_point(0.1, 1.0, 1.0)}, {1.0}),
                  InvalidInput);

  SplitMix64 rng(1);
  std::vector<PhasePoint> pts(1000);
  for (auto& p : pts) p = circle_point(uniform01(rng));
  auto cloud = EmpiricalMeasure::uniform(PhaseSpace::circle, pts);
  CHECK(std::fabs(cloud.total_mass() - 1.0) < 1e-12);
  CHECK(GridDensity::lebesgue(77).total_mass() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("node masses reproduce integrals of nodal hat functions") {
  auto f = GridDensity::from_function(37, [](double x) { return 1 + std::cos(kTwoPi * x); });
  for (std::size_t nodes : {16u, 37u, 100u}) {
    auto m = node_masses(f, nodes);
    double total = 0.0;
    for (double v : m) total += v;
    CHECK(total == doctest::Approx(f.total_mass()).epsilon(1e-13));
  }
  auto d = node_masses(EmpiricalMeasure::dirac(0.3), 10);
  CHECK(d[3] == doctest::Approx(1.0));
  auto e = node_masses(EmpiricalMeasure::dirac(0.35), 10);
  CHECK(e[3] == doctest::Approx(0.5));
  CHECK(e[4] == doctest::Approx(0.5));
}

TEST_CASE("cycle dual norm agrees with the LP oracle") {
  SplitMix64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 17u, 32u}) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> m(n);
      for (auto& v : m) v = uniform01(rng) - 0.5;
      if (trial % 2 == 0) {
        double mean = 0.0;
        for (double v : m) mean += v / static_cast<double>(n);
        for (auto& v : m) v -= mean;
      }
      double fast = cycle_dual_norm(m);
      double lp = oracle::cycle_dual_norm_lp(m);
      CHECK(fast == doctest::Approx(lp).epsilon(1e-9));
    }
  }
}

TEST_CASE("w_distance closed forms") {
  auto d0 = EmpiricalMeasure::dirac(0.0);
  CHECK(w_distance(d0, d0) == 0.0);
  auto f = GridDensity::from_function(64, [](double x) { return 1 + 0.5 * std::cos(kTwoPi * x); });
  CHECK(w_distance(f, f) == 0.0);
  CHECK(std::fabs(w_distance(d0, EmpiricalMeasure::dirac(0.3)) - 0.3) < 1e-3);
  CHECK(std::fabs(w_distance(d0, GridDensity::lebesgue(1000)) - 0.25) < 2e-3);

  // The same values through the LP oracle on a coarse grid.
  auto a = node_masses(d0, 40);
  auto b = node_masses(EmpiricalMeasure::dirac(0.3), 40);
  auto c = node_masses(GridDensity::lebesgue(40), 40);
  std::vector<double> ab(40), ac(40);
  for (int i = 0; i < 40; ++i) {
    ab[i] = a[i] - b[i];
    ac[i] = a[i] - c[i];
  }
  CHECK(std::fabs(oracle::cycle_dual_norm_lp(ab) - 0.3) < 1e-9);
  CHECK(std::fabs(oracle::cycle_dual_norm_lp(ac) - 0.25) < 1.0 / 40.0);
}

TEST_CASE("w_distance between diracs is the circle distance") {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    double x = uniform01(rng);
    double y = uniform01(rng);
    double w = w_distance(EmpiricalMeasure::dirac(x), EmpiricalMeasure::dirac(y), 1024);
    CHECK(std::fabs(w - circle_distance(x, y)) < 2.0 / 1024.0);
  }
}

TEST_CASE("w_distance is symmetric, bounded and satisfies the triangle inequality") {
  SplitMix64 rng(9);
  auto random_density = [&] {
    std::vector<double> v(50);
    double mean = 0.0;
    for (auto& x : v) {
      x = uniform01(rng);
      mean += x / 50.0;
    }
    for (auto& x : v) x /= mean;
    return GridDensity(v);
  };
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_density();
    auto b = random_density();
    Measure c = EmpiricalMeasure::dirac(uniform01(rng));
    double ab = w_distance(a, b, 512);
    CHECK(ab == w_distance(b, a, 512));
    CHECK(ab <= 2.0);
    CHECK(ab <= w_distance(a, c, 512) + w_distance(c, b, 512) + 1e-9);
  }
}

TEST_CASE("w_distance rejects solenoid clouds") {
  auto s = EmpiricalMeasure::dirac(PhaseSpace::solenoid, solenoid_point(0.1, 0.0, 0.0));
  CHECK_THROWS_AS(w_distance(s, EmpiricalMeasure::dirac(0.1)), InvalidInput);
  CHECK_NOTHROW(w_distance(s.base_marginal(), EmpiricalMeasure::dirac(0.1)));
}
