#include "loglaw/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "loglaw/errors.hpp"

namespace loglaw {

CircleMap::CircleMap(std::string name, Function lift, int degree)
    : name_(std::move(name)), lift_(std::move(lift)), degree_(degree) {
  if (!lift_) throw InvalidInput("CircleMap: empty lift");
  if (degree_ < 1) throw InvalidInput("CircleMap: an increasing lift has degree >= 1");
}

CircleMap CircleMap::from_function(std::string name, Function map) {
  if (!map) throw InvalidInput("CircleMap: empty map");
  CircleMap result("", [](double x) { return x; }, 1);
  result.name_ = std::move(name);
  result.lift_ = nullptr;
  result.map_ = std::move(map);
  result.degree_ = 0;
  return result;
}

CircleMap CircleMap::identity() {
  return CircleMap("identity", [](double x) { return x; }, 1);
}

CircleMap CircleMap::rotation(double angle) {
  std::ostringstream name;
  name << "rotation(" << angle << ")";
  return CircleMap(name.str(), [angle](double x) { return x + angle; }, 1);
}

ExpandingCircleMap::ExpandingCircleMap(int degree, double epsilon)
    : degree_(degree), epsilon_(epsilon) {
  if (degree_ < 2) throw ConfigError("expanding map: degree q must be >= 2");
  if (!std::isfinite(epsilon_) || !(kTwoPi * std::fabs(epsilon_) < degree_ - 1)) {
    throw ConfigError("expanding map: need 2*pi*|epsilon| < q - 1");
  }
}

double ExpandingCircleMap::min_expansion() const noexcept {
  return degree_ - kTwoPi * std::fabs(epsilon_);
}

CircleMap ExpandingCircleMap::as_circle_map() const {
  std::ostringstream name;
  name << "expanding(q=" << degree_ << ",epsilon=" << epsilon_ << ")";
  int q = degree_;
  double eps = epsilon_;
  if (eps == 0.0) {
    return CircleMap(name.str(), [q](double x) { return q * x; }, q);
  }
  return CircleMap(name.str(), [q, eps](double x) { return q * x + eps * std::sin(kTwoPi * x); },
                   q);
}

AutonomousCircleFamily::AutonomousCircleFamily(CircleMap map) : map_(std::move(map)) {}

AutonomousCircleFamily::AutonomousCircleFamily(const ExpandingCircleMap& map)
    : map_(map.as_circle_map()) {}

PhasePoint AutonomousCircleFamily::step(std::size_t, const PhasePoint& p) const {
  return {CirclePoint(map_(p.base.value())), {}};
}

std::string AutonomousCircleFamily::descriptor() const { return "autonomous " + map_.name(); }

CyclicCircleFamily::CyclicCircleFamily(std::vector<CircleMap> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) throw ConfigError("cyclic family: no maps");
}

const CircleMap& CyclicCircleFamily::at(std::size_t index) const {
  if (index == 0) throw InvalidInput("cyclic family: indices start at 1");
  return maps_[(index - 1) % maps_.size()];
}

PhasePoint CyclicCircleFamily::step(std::size_t index, const PhasePoint& p) const {
  return {CirclePoint(at(index)(p.base.value())), {}};
}

std::optional<CircleMap> CyclicCircleFamily::base_map(std::size_t index) const { return at(index); }

std::size_t CyclicCircleFamily::base_map_key(std::size_t index) const {
  return index == 0 ? 0 : (index - 1) % maps_.size() + 1;
}

std::string CyclicCircleFamily::descriptor() const {
  std::string out = "cyclic [";
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    if (i) out += ", ";
    out += maps_[i].name();
  }
  return out + "]";
}

SolenoidFamily::SolenoidFamily(SolenoidParams params) : params_(params) {
  const auto& p = params_;
  if (p.degree < 2) throw ConfigError("solenoid: degree q must be >= 2");
  if (!(p.lambda > 0.0 && p.lambda < 1.0)) throw ConfigError("solenoid: lambda must be in (0,1)");
  if (!(p.gamma >= 0.0) || !(p.lambda + p.gamma <= 1.0)) {
    throw ConfigError("solenoid: need gamma >= 0 and lambda + gamma <= 1");
  }
  if (!(p.c >= 0.0) || !std::isfinite(p.c)) throw ConfigError("solenoid: c must be >= 0");
  if (!(p.decay > 0.0 && p.decay < 1.0)) throw ConfigError("solenoid: decay must be in (0,1)");
}

double SolenoidFamily::schedule(std::size_t index) const {
  return std::pow(params_.decay, static_cast<double>(index));
}

Vec2 SolenoidFamily::fiber_map(std::size_t index, double x, Vec2 y) const {
  double s = std::sin(kTwoPi * x);
  double c = std::cos(kTwoPi * x);
  Vec2 g{params_.lambda * y.u + params_.gamma * c, params_.lambda * y.v + params_.gamma * s};
  if (index > 0 && params_.c != 0.0) {
    double amp = params_.c * schedule(index);
    g.u += amp * s;
    g.v += amp * c;
  }
  double r = norm(g);
  if (r > 1.0) g = ((1.0 - 1e-9) / r) * g;
  return g;
}

PhasePoint SolenoidFamily::step(std::size_t index, const PhasePoint& p) const {
  double x = p.base.value();
  return {CirclePoint(params_.degree * x), fiber_map(index, x, p.fiber)};
}

std::string SolenoidFamily::descriptor() const {
  std::ostringstream out;
  out << "solenoid(q=" << params_.degree << ",lambda=" << params_.lambda
      << ",gamma=" << params_.gamma << ",c=" << params_.c << ",decay=" << params_.decay << ")";
  return out.str();
}

std::optional<CircleMap> SolenoidFamily::base_map(std::size_t) const {
  return ExpandingCircleMap(params_.degree, 0.0).as_circle_map();
}

std::shared_ptr<const MapFamily> SolenoidFamily::limit_family() const {
  SolenoidParams limit = params_;
  limit.c = 0.0;
  return std::make_shared<SolenoidFamily>(limit);
}

PhasePoint SlowFamily::step(std::size_t index, const PhasePoint& p) const {
  if (limit_) return {CirclePoint(2.0 * p.base.value()), {}};
  if (index == 0) throw InvalidInput("slow family: the rule is defined for indices i >= 1");
  return {CirclePoint(2.0 * p.base.value()), {1.0 / std::sqrt(static_cast<double>(index)), 0.0}};
}

std::string SlowFamily::descriptor() const {
  return limit_ ? "slow-limit (2x, (0,0))" : "slow (2x, (i^-1/2, 0))";
}

std::optional<CircleMap> SlowFamily::base_map(std::size_t) const {
  return ExpandingCircleMap(2, 0.0).as_circle_map();
}

std::shared_ptr<const MapFamily> SlowFamily::limit_family() const {
  return std::make_shared<SlowFamily>(true);
}

Orbit::Orbit(const MapFamily& family, PhasePoint x0, OrbitOptions options)
    : family_(&family), point_(x0), options_(options), rng_(options.seed) {}

const PhasePoint& Orbit::advance() {
  ++steps_;
  point_ = family_->step(steps_, point_);
  if (options_.jitter > 0.0) {
    double kick = (uniform01(rng_) - 0.5) * options_.jitter;
    point_.base = CirclePoint(point_.base.value() + kick);
  }
  return point_;
}

std::vector<PhasePoint> orbit_points(const MapFamily& family, PhasePoint x0, std::size_t n,
                                     OrbitOptions options) {
  std::vector<PhasePoint> out;
  out.reserve(n + 1);
  for (const auto& p : orbit(family, x0, n, options)) out.push_back(p);
  return out;
}

std::vector<HitResult> hitting_times(const MapFamily& family, PhasePoint x0, PhasePoint y,
                                     std::span<const double> radii, std::size_t n_max,
                                     OrbitOptions options) {
  if (n_max < 1) throw InvalidInput("hitting_time: horizon must be >= 1");
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidInput("hitting_time: radius must be positive");
  }
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] > radii[b]; });

  std::vector<HitResult> result(radii.size(), HitResult{HitResult::Status::censored, n_max});
  PhaseSpace space = family.space();
  double diam = diameter(space);
  std::size_t next = 0;
  // Larger balls are entered no later than smaller ones, so the unhit radii are
  // always a suffix of `order`.
  auto record = [&](double d, std::size_t n) {
    while (next < order.size() && (d < radii[order[next]] || radii[order[next]] >= diam)) {
      result[order[next]] = {HitResult::Status::hit, n};
      ++next;
    }
  };
  Orbit path(family, x0, options);
  record(phase_distance(space, path.point(), y), 0);
  while (next < order.size() && path.steps() < n_max) {
    path.advance();
    record(phase_distance(space, path.point(), y), path.steps());
  }
  return result;
}

HitResult hitting_time(const MapFamily& family, PhasePoint x0, PhasePoint y, double r,
                       std::size_t n_max, OrbitOptions options) {
  double radius[] = {r};
  return hitting_times(family, x0, y, radius, n_max, options).front();
}

AssumptionReport verify_assumptions(const SolenoidFamily& family, std::size_t n_samples,
                                    std::uint64_t seed, std::size_t max_index) {
  if (n_samples < 100) throw InvalidInput("verify_assumptions: need at least 100 samples");
  const auto& p = family.params();
  SplitMix64 rng(stream_seed(seed, 0));
  auto random_fiber = [&] { return sample_lebesgue(PhaseSpace::solenoid, rng).fiber; };
  auto random_index = [&] {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_index + 1));
  };

  AssumptionReport report;

  double ratio = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double x = uniform01(rng);
    Vec2 y1 = random_fiber();
    Vec2 y2 = random_fiber();
    double gap = norm(y1 - y2);
    if (gap < 1e-12) continue;
    std::size_t i = random_index();
    ratio = std::max(ratio, norm(family.fiber_map(i, x, y1) - family.fiber_map(i, x, y2)) / gap);
  }
  report.contraction = {"fiber contraction ratio", ratio, p.lambda, ratio <= p.lambda + 1e-9};

  constexpr double kStep = 1e-6;
  double slope = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double x = uniform01(rng);
    Vec2 y = random_fiber();
    std::size_t i = random_index();
    Vec2 diff = family.fiber_map(i, x + kStep, y) - family.fiber_map(i, x - kStep, y);
    slope = std::max(slope, norm(diff) / (2.0 * kStep));
  }
  double slope_bound = kTwoPi * (p.gamma + p.c);
  report.x_derivative = {"sup |dG_i/dx|", slope, slope_bound, slope <= slope_bound * (1.0 + 1e-6)};

  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= max_index; ++i) {
    double sup = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
      double x = uniform01(rng);
      Vec2 y = random_fiber();
      sup = std::max(sup, norm(family.fiber_map(i, x, y) - family.fiber_map(0, x, y)));
    }
    double bound = p.c * std::sqrt(2.0) * family.schedule(i);
    report.decay_samples.push_back({i, sup, bound});
    excess = std::max(excess, sup - bound);
  }
  report.decay = {"max_i (sup|G_i - G_0| - c sqrt2 Phi(i))", excess, 0.0, excess <= 1e-15};
  return report;
}

}  // namespace loglaw
