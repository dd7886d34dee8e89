#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "loglaw/errors.hpp"
#include "loglaw/meanfield.hpp"
#include "loglaw/stats.hpp"

using namespace loglaw;

namespace {

MeanFieldConfig config(double delta, double eps = 0.0, Representation rep = DensityRepresentation{1024}) {
  return MeanFieldConfig(ExpandingCircleMap(2, eps), Coupling::sine(), delta, rep);
}

double l1(const GridDensity& a, const GridDensity& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_cells(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.n_cells());
}

// Cell averages of a fine density on a grid coarser by an integer factor.
GridDensity coarsen(const GridDensity& fine, std::size_t factor) {
  std::vector<double> out(fine.n_cells() / factor, 0.0);
  for (std::size_t i = 0; i < fine.n_cells(); ++i) out[i / factor] += fine[i] / static_cast<double>(factor);
  return GridDensity(out);
}

}  // namespace

TEST_CASE("mean displacement examples") {
  GlobalState leb{GridDensity::lebesgue(256), 0};
  GlobalState atom{EmpiricalMeasure::dirac(0.25), 0};
  for (double x : {0.0, 0.3, 0.9}) CHECK(mean_displacement(x, atom, config(0.0)) == 0.0);
  CHECK(mean_displacement(0.0, atom, config(0.07)) == doctest::Approx(0.07));
  CHECK(std::fabs(mean_displacement(0.37, leb, config(0.05))) < 1e-15);
}

TEST_CASE("phi examples") {
  GlobalState half{EmpiricalMeasure::dirac(0.5), 0};
  CHECK(phi(CirclePoint(0.3), half, config(0.0)).value() == 0.3);
  CHECK(phi(CirclePoint(0.25), half, config(0.05)).value() == doctest::Approx(0.3));
}

TEST_CASE("coupling strength gate") {
  auto c = config(0.05);
  CHECK(c.delta_max() == doctest::Approx(1.0 / (4.0 * M_PI)));
  try {
    config(0.08);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("coupling too strong") != std::string::npos);
  }
  CHECK_THROWS_AS(config(-0.01), ConfigError);
  CHECK_NOTHROW(config(0.079));
}

TEST_CASE("phi is increasing for admissible couplings") {
  SplitMix64 rng(6);
  std::vector<PhasePoint> pts(64);
  for (auto& p : pts) p = circle_point(uniform01(rng));
  GlobalState cloud{EmpiricalMeasure::uniform(PhaseSpace::circle, pts), 0};
  GlobalState atom{EmpiricalMeasure::dirac(0.1), 0};
  auto c = config(0.0795);
  for (const auto* state : {&cloud, &atom}) {
    double prev = phi(CirclePoint(0.0), *state, c).value();
    double turned = 0.0;
    for (int i = 1; i <= 4096; ++i) {
      double x = i / 4096.0;
      double next = phi(CirclePoint(x), *state, c).value();
      double step = next - prev;
      if (step < -0.5) step += 1.0;
      CHECK(step > 0.0);
      turned += step;
      prev = next;
    }
    CHECK(turned == doctest::Approx(1.0));
  }
}

TEST_CASE("sct_step examples") {
  MeanFieldSystem uncoupled(config(0.0));
  GlobalState leb{GridDensity::lebesgue(1024), 0};
  auto next = sct_step(leb, uncoupled);
  CHECK(next.time == 1);
  for (double v : std::get<GridDensity>(next.measure).values()) CHECK(v == 1.0);

  MeanFieldSystem coupled(config(0.05));
  DisplacementField zero(leb.measure, coupled.config());
  for (double x : {0.0, 0.2, 0.7}) CHECK(std::fabs(zero(x)) < 1e-15);
  auto kept = sct_step(leb, coupled);
  for (double v : std::get<GridDensity>(kept.measure).values()) CHECK(std::fabs(v - 1.0) < 1e-12);
}

TEST_CASE("particles at zero coupling are just mapped by T") {
  MeanFieldSystem uncoupled(config(0.0, 0.0, ParticleRepresentation{500}));
  SplitMix64 rng(3);
  std::vector<PhasePoint> pts(500);
  for (auto& p : pts) p = circle_point(uniform01(rng));
  GlobalState state{EmpiricalMeasure::uniform(PhaseSpace::circle, pts), 0};
  auto next = sct_step(state, uncoupled);
  auto moved = std::get<EmpiricalMeasure>(next.measure).points();
  AutonomousCircleFamily T(ExpandingCircleMap(2, 0));
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(moved[i] == T.step(1, pts[i]));
}

TEST_CASE("displacement pushes conserve mass and move an atom like phi") {
  auto c = config(0.07);
  auto f = GridDensity::from_function(2048, [](double x) { return 1 + 0.8 * std::cos(kTwoPi * x); });
  GlobalState state{f, 0};
  DisplacementField field(state.measure, c);
  auto g = push_by_displacement(f, field);
  CHECK(g.total_mass() == doctest::Approx(f.total_mass()).epsilon(1e-13));
  for (double v : g.values()) CHECK(v >= 0.0);

  // A narrow bump travels to phi of its center.
  std::vector<double> bump(2048, 0.0);
  bump[512] = 2048.0;
  auto moved = push_by_displacement(GridDensity(bump), field);
  double center = 0.0;
  for (std::size_t i = 0; i < 2048; ++i) center += moved[i] * moved.cell_midpoint(i) / 2048.0;
  double expected = phi(CirclePoint(GridDensity(bump).cell_midpoint(512)), state, c).value();
  CHECK(std::fabs(center - expected) < 2.0 / 2048.0);
}

TEST_CASE("non-separable kernels agree with the separable path") {
  auto general = MeanFieldConfig(ExpandingCircleMap(2, 0.05),
                                 Coupling::general("sin", [](double x, double y) { return std::sin(kTwoPi * (y - x)); }),
                                 0.05, DensityRepresentation{512});
  CHECK(general.coupling().sup_dx() == doctest::Approx(kTwoPi).epsilon(1e-3));
  auto separable = config(0.05, 0.05, DensityRepresentation{512});
  auto f = GridDensity::from_function(512, [](double x) { return 1 + 0.5 * std::cos(kTwoPi * x); });
  DisplacementField a(f, general);
  DisplacementField b(f, separable);
  CHECK(a.sup_distance(b) < 1e-5);

  MeanFieldSystem sa(general);
  MeanFieldSystem sb(separable);
  GlobalState s{f, 0};
  CHECK(l1(std::get<GridDensity>(sct_step(s, sa).measure), std::get<GridDensity>(sct_step(s, sb).measure)) < 1e-5);

  CHECK_THROWS_AS(MeanFieldConfig(ExpandingCircleMap(2, 0), general.coupling(), 0.01, ParticleRepresentation{50000}),
                  ConfigError);
}

TEST_CASE("particles track the density") {
  auto f0 = GridDensity::from_function(4096, [](double x) { return 1 + 0.5 * std::cos(kTwoPi * x); });
  MeanFieldSystem dens(config(0.05, 0.05, DensityRepresentation{4096}));
  MeanFieldSystem parts(config(0.05, 0.05, ParticleRepresentation{100000}));
  GlobalState ds{f0, 0};
  SplitMix64 rng(21);
  auto draw = density_sampler(f0);
  std::vector<PhasePoint> pts(100000);
  for (auto& p : pts) p = draw(rng);
  GlobalState ps{EmpiricalMeasure::uniform(PhaseSpace::circle, pts), 0};
  for (int t = 0; t < 20; ++t) {
    ds = sct_step(ds, dens);
    ps = sct_step(ps, parts);
  }
  CHECK(ps.time == 20);
  CHECK(w_distance(ds.measure, ps.measure) <= 0.01 + 1.0 / std::sqrt(100000.0));
}

TEST_CASE("fixed point examples") {
  MeanFieldSystem uncoupled(config(0.0, 0.0, DensityRepresentation{4096}));
  auto a = fixed_point(uncoupled, 1e-10);
  for (double v : a.density.values()) CHECK(std::fabs(v - 1.0) <= 1e-10);

  MeanFieldSystem coupled(config(0.05, 0.0, DensityRepresentation{4096}));
  auto b = fixed_point(coupled, 1e-10);
  for (double v : b.density.values()) CHECK(std::fabs(v - 1.0) <= 1e-10);

  MeanFieldSystem perturbed(config(0.02, 0.05, DensityRepresentation{1024}));
  auto c = fixed_point(perturbed, 1e-9);
  CHECK(c.residual < 1e-9);
  CHECK(c.density.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  double spread = 0.0;
  for (double v : c.density.values()) spread = std::max(spread, std::fabs(v - 1.0));
  CHECK(spread > 1e-2);

  MeanFieldSystem fine(config(0.02, 0.05, DensityRepresentation{2048}));
  auto d = fixed_point(fine, 1e-9);
  CHECK(l1(coarsen(d.density, 2), c.density) < 1e-2);

  // The returned density is a fixed point to the requested tolerance.
  GlobalState s{c.density, 0};
  auto again = std::get<GridDensity>(sct_step(s, perturbed).measure);
  CHECK(w11_norm(again - c.density) < 2e-9);
  CHECK(c.residuals.size() == c.iterations);

  CHECK_THROWS_AS(fixed_point(perturbed, 1e-9, 2), ConvergenceError);
}

TEST_CASE("induced family examples") {
  auto T = ExpandingCircleMap(2, 0.05);
  auto f0 = GridDensity::from_function(1024, [](double x) { return 1 + 0.3 * std::cos(kTwoPi * x); });

  auto zero = std::make_shared<MeanFieldSystem>(config(0.0, 0.05));
  auto plain = induced_family(zero, GlobalState{f0, 0});
  for (std::size_t i : {1u, 2u, 50u}) {
    for (double x : {0.1, 0.5, 0.77}) CHECK(plain->step(i, circle_point(x)).base.value() == T(x));
  }

  auto system = std::make_shared<MeanFieldSystem>(config(0.05, 0.05));
  auto fp = fixed_point(*system, 1e-12);
  auto steady = induced_family(system, GlobalState{fp.density, 0});
  for (std::size_t i : {2u, 10u, 100u}) CHECK(steady->field(i).sup_distance(steady->field(0)) < 1e-12);

  auto moving = induced_family(system, GlobalState{f0, 0});
  DisplacementField limit(fp.density, system->config());
  CHECK(moving->field(0).sup_distance(limit) > 1e-3);
  CHECK(moving->field(60).sup_distance(limit) < 1e-6);
  CHECK(moving->base_map_key(100000) == moving->settled_at() + 1);
  CHECK_THROWS_AS(moving->step(0, circle_point(0.1)), InvalidInput);

  // The induced base map is Phi o T.
  auto map = moving->base_map(3);
  REQUIRE(map);
  for (double x : {0.05, 0.4, 0.95}) {
    CHECK((*map)(x) == doctest::Approx(moving->step(3, circle_point(x)).base.value()));
  }
}
