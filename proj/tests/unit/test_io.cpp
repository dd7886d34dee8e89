#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "loglaw/errors.hpp"
#include "loglaw/io.hpp"

using namespace loglaw;

namespace {

EmpiricalMeasure small_solenoid_cloud() {
  return EmpiricalMeasure(PhaseSpace::solenoid,
                          {solenoid_point(0.1, 0.2, -0.3), solenoid_point(1.0 / 3.0, 0.0, 0.7)},
                          {0.25, 0.75});
}

}  // namespace

TEST_CASE("csv round trips are exact") {
  auto f = GridDensity::from_function(16, [](double x) { return 1.0 + 0.3 * std::sin(kTwoPi * x); });
  std::stringstream a;
  write_csv(a, f);
  CHECK(a.str().rfind("index,value\n", 0) == 0);
  auto back = std::get<GridDensity>(read_measure_csv(a));
  for (std::size_t i = 0; i < 16; ++i) CHECK(back[i] == f[i]);

  auto cloud = small_solenoid_cloud();
  std::stringstream b;
  write_csv(b, cloud);
  CHECK(b.str().rfind("x,u,v,weight\n", 0) == 0);
  auto again = std::get<EmpiricalMeasure>(read_measure_csv(b));
  REQUIRE(again.size() == 2);
  CHECK(again.points()[1] == cloud.points()[1]);
  CHECK(again.weights()[0] == 0.25);

  std::stringstream c;
  write_csv(c, EmpiricalMeasure::dirac(0.3));
  CHECK(c.str() == "x,weight\n0.29999999999999999,1\n");
}

TEST_CASE("csv rejects malformed input") {
  std::istringstream header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_measure_csv(header), InvalidInput);
  std::istringstream number("index,value\n0,abc\n");
  CHECK_THROWS_AS(read_measure_csv(number), InvalidInput);
  std::istringstream order("index,value\n1,1\n0,1\n");
  CHECK_THROWS_AS(read_measure_csv(order), InvalidInput);
  std::istringstream columns("x,u,v,weight\n0.1,0.2,1\n");
  CHECK_THROWS_AS(read_measure_csv(columns), InvalidInput);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_measure_csv(empty), InvalidInput);
}

TEST_CASE("json round trips") {
  auto f = GridDensity::lebesgue(4);
  auto back = std::get<GridDensity>(measure_from_json(to_json(f)));
  CHECK(back.n_cells() == 4);
  auto cloud = small_solenoid_cloud();
  auto again = std::get<EmpiricalMeasure>(measure_from_json(to_json(cloud)));
  CHECK(again.points()[0] == cloud.points()[0]);
  CHECK(again.space() == PhaseSpace::solenoid);

  CHECK_THROWS_AS(measure_from_json("{"), InvalidInput);
  CHECK_THROWS_AS(measure_from_json(R"({"space":"torus","n_cells":1,"data":[1]})"), InvalidInput);
  CHECK_THROWS_AS(measure_from_json(R"({"space":"circle","n_cells":2,"data":[1]})"), InvalidInput);
}

TEST_CASE("orbit, matrix, curve and scaling writers") {
  std::vector<PhasePoint> pts{circle_point(0.25), circle_point(0.5)};
  std::ostringstream o;
  write_orbit_csv(o, PhaseSpace::circle, pts);
  CHECK(o.str() == "step,x\n0,0.25\n1,0.5\n");

  std::ostringstream m;
  write_ulam_csv(m, UlamMatrix::identity(2));
  CHECK(m.str() == "i,j,p\n0,0,1\n1,1,1\n");

  ConvergenceCurve curve;
  curve.norm = CurveNorm::w11;
  curve.steps = {0, 1};
  curve.values = {1.0, 0.5};
  std::ostringstream c;
  write_curve_csv(c, curve);
  CHECK(c.str() == "k,w11_norm\n0,1\n1,0.5\n");
  CHECK(curve_json(curve) == R"({"fit":null,"floor_reached_at":null,"norm":"w11"})");

  ScalingFit fit;
  fit.slope = 1.5;
  fit.points.push_back({0.5, 1.0, 2.0, 10, 1, true});
  std::ostringstream s;
  write_scaling_csv(s, fit);
  CHECK(s.str() == "radius,log_x,log_y,n,censored,used\n0.5,1,2,10,1,1\n");
  CHECK(scaling_json(fit) == R"({"intercept":0.0,"r2":0.0,"slope":1.5})");
}
