#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "loglaw/measures.hpp"
#include "loglaw/random.hpp"
#include "loglaw/systems.hpp"

namespace loglaw {

/// r_k = r0 * ratio^k for k = 0..count-1.
class RadiiSchedule {
 public:
  RadiiSchedule(double r0, double ratio, std::size_t count);

  double r0() const noexcept { return r0_; }
  double ratio() const noexcept { return ratio_; }
  std::size_t count() const noexcept { return count_; }
  double operator[](std::size_t k) const;
  std::vector<double> radii() const;

 private:
  double r0_;
  double ratio_;
  std::size_t count_;
};

/// r_k = k^-beta for k >= 1.
struct PowerRadii {
  double beta = 0.5;
};

struct ScalingPoint {
  double radius = 0.0;
  /// Regression abscissa and ordinate.
  double x = 0.0;
  double y = 0.0;
  std::size_t samples = 0;
  std::size_t censored = 0;
  bool used = false;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<ScalingPoint> points;
};

/// Draws an initial condition.
using Sampler = std::function<PhasePoint(SplitMix64&)>;

Sampler lebesgue_sampler(PhaseSpace space);
/// Inverse-CDF sampling from a nonnegative grid density, linear inside cells.
Sampler density_sampler(const GridDensity& f);

struct LoglawOptions {
  std::size_t n_samples = 200;
  std::size_t n_max = 1'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double jitter = kShadowJitter;
  /// Fraction of uncensored samples a radius needs to enter the fit.
  double min_uncensored = 0.95;
};

/// Slope of the mean of log(1 + tau_r) over uncensored samples against -log r.
/// Index 0 counts as a hit, hence the shift by one. Throws InsufficientData
/// with per-radius censoring counts when fewer than two radii pass the
/// min_uncensored rule.
ScalingFit loglaw_exponent(const MapFamily& family, PhasePoint y, const Sampler& mu0,
                           const RadiiSchedule& schedule, const LoglawOptions& options = {});

inline constexpr std::size_t kMinCloudSize = 10000;
inline constexpr std::size_t kMinBallPoints = 50;
inline constexpr std::size_t kMinDimensionRadii = 3;

/// Slope of log mu(B_r(y)) against log r over radii whose ball holds at least
/// kMinBallPoints cloud points.
ScalingFit local_dimension(const EmpiricalMeasure& cloud, PhasePoint y,
                           const RadiiSchedule& schedule);

/// Terminal points of n_points Lebesgue-distributed initial conditions after
/// burn_in steps, with uniform weights.
EmpiricalMeasure equilibrium_cloud(const MapFamily& family, std::size_t n_points,
                                   std::size_t burn_in, std::uint64_t seed, unsigned threads = 1,
                                   double jitter = kShadowJitter);

using RadiusRule = std::variant<RadiiSchedule, PowerRadii>;

struct BorelCantelliOptions {
  std::size_t n_samples = 200;
  std::size_t n_steps = 20000;
  /// Independent held-out orbits sharing one estimate of E(Z_n).
  std::size_t n_held_out = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double jitter = kShadowJitter;
};

struct BorelCantelliResult {
  /// E(Z_n) for n = 1..n_steps.
  std::vector<double> expected;
  /// ratios[o][n-1] = Z_n / E(Z_n) for held-out orbit o.
  std::vector<std::vector<double>> ratios;
};

/// Radius R_j of the j-th target (j >= 1); R_0 is infinite. For a schedule,
/// R_j = schedule[j - 1]; for the power rule, R_j = j^-beta.
double target_radius(const RadiusRule& rule, std::size_t j);

/// phi_j = 1 on B(y, R_j), 0 outside B(y, R_{j-1}), linear in the distance in
/// between. With R_0 infinite, phi_1 is the indicator of B(y, R_1).
double target_weight(double distance, double inner, double outer);

/// Z_n = sum_{j <= n} phi_j(T^(j) x) along held-out orbits, normalized by a
/// Monte Carlo estimate of E(Z_n) from n_samples fresh orbits. Throws
/// InsufficientData when E(Z_n) vanishes for every n.
BorelCantelliResult borel_cantelli_ratio(const MapFamily& family, PhasePoint y,
                                         const RadiusRule& rule, const Sampler& mu0,
                                         const BorelCantelliOptions& options);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct Comparison {
  Verdict verdict = Verdict::inconclusive;
  double difference = 0.0;
  double tolerance = 0.0;
  ScalingFit loglaw;
  ScalingFit dimension;
  std::string report;
};

inline constexpr double kMinFitQuality = 0.9;

/// Pass iff |loglaw.slope - dimension.slope| <= tol; inconclusive when either
/// fit has r^2 below kMinFitQuality.
Comparison compare(const ScalingFit& loglaw, const ScalingFit& dimension, double tol);

}  // namespace loglaw
