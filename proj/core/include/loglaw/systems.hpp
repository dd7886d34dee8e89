#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loglaw/phase_space.hpp"
#include "loglaw/random.hpp"

namespace loglaw {

/// A circle map given by an increasing lift R -> R with lift(x + 1) = lift(x) + degree.
/// Maps built from a bare function (`from_function`) have no lift; the Ulam
/// builder then falls back to sampling.
class CircleMap {
 public:
  using Function = std::function<double(double)>;

  CircleMap(std::string name, Function lift, int degree);
  static CircleMap from_function(std::string name, Function map);

  static CircleMap identity();
  static CircleMap rotation(double angle);

  double operator()(double x) const { return wrap_unit(has_lift() ? lift_(x) : map_(x)); }
  double lift(double x) const { return lift_(x); }
  bool has_lift() const noexcept { return static_cast<bool>(lift_); }
  int degree() const noexcept { return degree_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  Function lift_;
  Function map_;
  int degree_ = 1;
};

/// T(x) = q x + eps sin(2 pi x) mod 1, expanding when 2 pi |eps| < q - 1.
class ExpandingCircleMap {
 public:
  explicit ExpandingCircleMap(int degree = 2, double epsilon = 0.0);

  int degree() const noexcept { return degree_; }
  double epsilon() const noexcept { return epsilon_; }
  double lift(double x) const noexcept { return degree_ * x + epsilon_ * std::sin(kTwoPi * x); }
  double operator()(double x) const noexcept { return wrap_unit(lift(x)); }
  double derivative(double x) const noexcept {
    return degree_ + kTwoPi * epsilon_ * std::cos(kTwoPi * x);
  }
  /// q - 2 pi |eps|, the guaranteed lower bound of |T'|.
  double min_expansion() const noexcept;

  CircleMap as_circle_map() const;

 private:
  int degree_;
  double epsilon_;
};

/// An indexed family i -> T_i on a phase space. The sequential composition is
/// T^(k) = T_k o ... o T_1. Implementations are immutable and thread-safe.
class MapFamily {
 public:
  virtual ~MapFamily() = default;

  virtual PhaseSpace space() const noexcept = 0;
  virtual PhasePoint step(std::size_t index, const PhasePoint& p) const = 0;
  virtual std::string descriptor() const = 0;

  /// The circle map acting on the base coordinate at `index`, when the base
  /// dynamics does not depend on the fiber. Every implemented family has one.
  virtual std::optional<CircleMap> base_map(std::size_t index) const = 0;

  /// Indices with equal keys have identical base maps; operator caches use it.
  virtual std::size_t base_map_key(std::size_t index) const { return index; }

  /// The autonomous limit family F_0, if the family is asymptotically autonomous.
  virtual std::shared_ptr<const MapFamily> limit_family() const { return nullptr; }
};

using FamilyPtr = std::shared_ptr<const MapFamily>;

/// One circle map applied at every index.
class AutonomousCircleFamily final : public MapFamily {
 public:
  explicit AutonomousCircleFamily(CircleMap map);
  explicit AutonomousCircleFamily(const ExpandingCircleMap& map);

  PhaseSpace space() const noexcept override { return PhaseSpace::circle; }
  PhasePoint step(std::size_t index, const PhasePoint& p) const override;
  std::string descriptor() const override;
  std::optional<CircleMap> base_map(std::size_t) const override { return map_; }
  std::size_t base_map_key(std::size_t) const override { return 1; }

 private:
  CircleMap map_;
};

/// Cycles through a list of circle maps: T_i = maps[(i - 1) mod m].
class CyclicCircleFamily final : public MapFamily {
 public:
  explicit CyclicCircleFamily(std::vector<CircleMap> maps);

  PhaseSpace space() const noexcept override { return PhaseSpace::circle; }
  PhasePoint step(std::size_t index, const PhasePoint& p) const override;
  std::string descriptor() const override;
  std::optional<CircleMap> base_map(std::size_t index) const override;
  std::size_t base_map_key(std::size_t index) const override;

 private:
  const CircleMap& at(std::size_t index) const;
  std::vector<CircleMap> maps_;
};

struct SolenoidParams {
  int degree = 2;
  double lambda = 0.25;
  double gamma = 0.5;
  double c = 0.1;
  /// Phi(i) = decay^i.
  double decay = 0.5;
};

/// Skew product F_i(x, y) = (T(x), G_i(x, y)) on S^1 x D^2 with
///   G_0(x, y) = lambda y + gamma (cos 2 pi x, sin 2 pi x),
///   G_i = G_0 + c Phi(i) (sin 2 pi x, cos 2 pi x)   for i >= 1,
/// and T(x) = q x mod 1. Index 0 applies the limit map F_0. Images with norm
/// above one are rescaled radially to 1 - 1e-9.
class SolenoidFamily final : public MapFamily {
 public:
  explicit SolenoidFamily(SolenoidParams params = {});

  const SolenoidParams& params() const noexcept { return params_; }
  double schedule(std::size_t index) const;
  Vec2 fiber_map(std::size_t index, double x, Vec2 y) const;

  PhaseSpace space() const noexcept override { return PhaseSpace::solenoid; }
  PhasePoint step(std::size_t index, const PhasePoint& p) const override;
  std::string descriptor() const override;
  std::optional<CircleMap> base_map(std::size_t) const override;
  std::size_t base_map_key(std::size_t) const override { return 1; }
  std::shared_ptr<const MapFamily> limit_family() const override;

 private:
  SolenoidParams params_;
};

/// F_i(x, y) = (2x mod 1, (i^{-1/2}, 0)) for i >= 1, which converges to its limit
/// F_0(x, y) = (2x mod 1, (0, 0)) too slowly for a logarithm law. With
/// `limit = true` the family is F_0 itself.
class SlowFamily final : public MapFamily {
 public:
  explicit SlowFamily(bool limit = false) : limit_(limit) {}

  PhaseSpace space() const noexcept override { return PhaseSpace::solenoid; }
  PhasePoint step(std::size_t index, const PhasePoint& p) const override;
  std::string descriptor() const override;
  std::optional<CircleMap> base_map(std::size_t) const override;
  std::size_t base_map_key(std::size_t) const override { return 1; }
  std::shared_ptr<const MapFamily> limit_family() const override;

 private:
  bool limit_;
};

/// Deterministic perturbation of orbits. With `jitter > 0` every step adds
/// (u - 1/2) * jitter to the base coordinate, u uniform from a generator seeded
/// with `seed`. Iterating an expanding map in floating point discards one
/// mantissa bit per doubling (the doubling orbit of any double reaches 0 within
/// 60 steps); the jitter supplies the missing low-order bits, and the resulting
/// pseudo-orbit is shadowed by a true orbit because the maps are expanding.
struct OrbitOptions {
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

/// Default jitter for Monte Carlo estimators, far below any radius in use.
inline constexpr double kShadowJitter = 0x1.0p-44;

/// Lazily generated orbit x_0, T^(1)(x_0), ..., T^(n)(x_0). Single consumer.
class Orbit {
 public:
  Orbit(const MapFamily& family, PhasePoint x0, OrbitOptions options = {});

  const PhasePoint& point() const noexcept { return point_; }
  std::size_t steps() const noexcept { return steps_; }
  /// Applies the next map T_{steps+1}.
  const PhasePoint& advance();

 private:
  const MapFamily* family_;
  PhasePoint point_;
  std::size_t steps_ = 0;
  OrbitOptions options_;
  SplitMix64 rng_;
};

/// Range over the first n+1 orbit points, usable in range-for.
class OrbitRange {
 public:
  OrbitRange(const MapFamily& family, PhasePoint x0, std::size_t n, OrbitOptions options)
      : family_(&family), x0_(x0), n_(n), options_(options) {}

  class iterator {
   public:
    using value_type = PhasePoint;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    explicit iterator(const OrbitRange& range)
        : orbit_(std::in_place, *range.family_, range.x0_, range.options_), remaining_(range.n_ + 1) {}

    const PhasePoint& operator*() const { return orbit_->point(); }
    iterator& operator++() {
      if (--remaining_ > 0) orbit_->advance();
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.remaining_ == 0; }

   private:
    std::optional<Orbit> orbit_;
    std::size_t remaining_ = 0;
  };

  iterator begin() const { return iterator(*this); }
  std::default_sentinel_t end() const { return {}; }

 private:
  const MapFamily* family_;
  PhasePoint x0_;
  std::size_t n_;
  OrbitOptions options_;
};

inline OrbitRange orbit(const MapFamily& family, PhasePoint x0, std::size_t n,
                        OrbitOptions options = {}) {
  return OrbitRange(family, x0, n, options);
}

/// Materialized orbit, for export and tests.
std::vector<PhasePoint> orbit_points(const MapFamily& family, PhasePoint x0, std::size_t n,
                                     OrbitOptions options = {});

struct HitResult {
  enum class Status { hit, censored };
  Status status = Status::censored;
  /// Hitting index, or the horizon when censored.
  std::size_t steps = 0;

  bool hit() const noexcept { return status == Status::hit; }
  friend bool operator==(const HitResult&, const HitResult&) = default;
};

/// First n <= n_max with d(T^(n)(x0), y) < r; index 0 counts. Radii at or above
/// the diameter of the phase space give an immediate hit.
HitResult hitting_time(const MapFamily& family, PhasePoint x0, PhasePoint y, double r,
                       std::size_t n_max, OrbitOptions options = {});

/// Hitting times of several balls around y along one orbit. Order of the
/// results follows `radii`.
std::vector<HitResult> hitting_times(const MapFamily& family, PhasePoint x0, PhasePoint y,
                                     std::span<const double> radii, std::size_t n_max,
                                     OrbitOptions options = {});

struct AssumptionCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct DecaySample {
  std::size_t index = 0;
  double measured = 0.0;
  /// c sqrt(2) Phi(i)
  double bound = 0.0;
};

struct AssumptionReport {
  AssumptionCheck contraction;
  AssumptionCheck x_derivative;
  AssumptionCheck decay;
  std::vector<DecaySample> decay_samples;
  bool all_pass() const noexcept { return contraction.pass && x_derivative.pass && decay.pass; }
};

/// Empirical check of the fiber contraction, the bounded x-derivative and the
/// decay sup|G_i - G_0| <= c sqrt(2) Phi(i) over seeded random samples.
AssumptionReport verify_assumptions(const SolenoidFamily& family, std::size_t n_samples,
                                    std::uint64_t seed = 0, std::size_t max_index = 30);

/// Uniform (Lebesgue) sample from the phase space: uniform base, and uniform
/// in the unit disc for the fiber.
template <class Rng>
PhasePoint sample_lebesgue(PhaseSpace space, Rng& rng) {
  PhasePoint p{CirclePoint(uniform01(rng)), {}};
  if (space == PhaseSpace::solenoid) {
    double radius = std::sqrt(uniform01(rng));
    double angle = kTwoPi * uniform01(rng);
    p.fiber = {radius * std::cos(angle), radius * std::sin(angle)};
  }
  return p;
}

}  // namespace loglaw
