#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>

namespace loglaw {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces a real number to [0, 1).
inline double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  // floor can leave r == 1.0 for tiny negative x
  return r >= 1.0 ? 0.0 : r;
}

/// Geodesic distance on R/Z, in [0, 1/2].
inline double circle_distance(double a, double b) noexcept {
  double d = std::fabs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

/// A point of the unit circle S^1 = R/Z. The coordinate is always in [0, 1).
class CirclePoint {
 public:
  constexpr CirclePoint() = default;
  explicit CirclePoint(double x) noexcept : x_(wrap_unit(x)) {}

  double value() const noexcept { return x_; }

  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;

 private:
  double x_ = 0.0;
};

inline double distance(CirclePoint a, CirclePoint b) noexcept {
  return circle_distance(a.value(), b.value());
}

struct Vec2 {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(Vec2 a) noexcept { return std::hypot(a.u, a.v); }
inline Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.u, s * a.v}; }

enum class PhaseSpace { circle, solenoid };

std::string_view to_string(PhaseSpace space) noexcept;

/// A point of the phase space of a family: the circle S^1, or the filled torus
/// S^1 x D^2. Circle systems keep `fiber` at the origin.
struct PhasePoint {
  CirclePoint base;
  Vec2 fiber;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

using SolenoidPoint = PhasePoint;

inline PhasePoint circle_point(double x) noexcept { return {CirclePoint(x), {}}; }
inline PhasePoint solenoid_point(double x, double u, double v) noexcept {
  return {CirclePoint(x), {u, v}};
}

/// Product (max) metric on S^1 x D^2; reduces to the circle metric for circle systems.
inline double phase_distance(PhaseSpace space, const PhasePoint& a, const PhasePoint& b) noexcept {
  double d = distance(a.base, b.base);
  if (space == PhaseSpace::solenoid) d = std::max(d, norm(a.fiber - b.fiber));
  return d;
}

inline double diameter(PhaseSpace space) noexcept {
  return space == PhaseSpace::circle ? 0.5 : 2.0;
}

}  // namespace loglaw
