#include "loglaw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loglaw/errors.hpp"
#include "loglaw/parallel.hpp"
#include "loglaw/regression.hpp"

namespace loglaw {

RadiiSchedule::RadiiSchedule(double r0, double ratio, std::size_t count)
    : r0_(r0), ratio_(ratio), count_(count) {
  if (!(r0_ > 0.0) || !std::isfinite(r0_)) throw InvalidInput("RadiiSchedule: r0 must be > 0");
  if (!(ratio_ > 0.0 && ratio_ < 1.0)) throw InvalidInput("RadiiSchedule: ratio must be in (0,1)");
  if (count_ < 1) throw InvalidInput("RadiiSchedule: need at least one radius");
  if (!((*this)[count_ - 1] > 0.0)) throw InvalidInput("RadiiSchedule: radii underflow");
}

double RadiiSchedule::operator[](std::size_t k) const {
  return r0_ * std::pow(ratio_, static_cast<double>(k));
}

std::vector<double> RadiiSchedule::radii() const {
  std::vector<double> out(count_);
  for (std::size_t k = 0; k < count_; ++k) out[k] = (*this)[k];
  return out;
}

Sampler lebesgue_sampler(PhaseSpace space) {
  return [space](SplitMix64& rng) { return sample_lebesgue(space, rng); };
}

Sampler density_sampler(const GridDensity& f) {
  std::size_t n = f.n_cells();
  double h = f.cell_width();
  auto cumulative = std::make_shared<std::vector<double>>(n + 1, 0.0);
  auto values = std::make_shared<std::vector<double>>(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!((*values)[i] >= 0.0)) throw InvalidInput("density_sampler: negative density");
    (*cumulative)[i + 1] = (*cumulative)[i] + (*values)[i] * h;
  }
  if (!((*cumulative)[n] > 0.0)) throw InvalidInput("density_sampler: zero mass");
  return [cumulative, values, h, n](SplitMix64& rng) {
    double target = uniform01(rng) * cumulative->back();
    auto it = std::upper_bound(cumulative->begin() + 1, cumulative->end(), target);
    auto i = static_cast<std::size_t>(it - cumulative->begin()) - 1;
    i = std::min(i, n - 1);
    double within = (*values)[i] > 0.0 ? (target - (*cumulative)[i]) / ((*values)[i] * h) : 0.5;
    within = std::clamp(within, 0.0, 1.0);
    return circle_point((static_cast<double>(i) + within) * h);
  };
}

namespace {

std::string censoring_table(const std::vector<ScalingPoint>& points) {
  std::ostringstream out;
  for (const auto& p : points) {
    out << "\n  r = " << p.radius << ": " << p.censored << " of " << p.samples << " censored";
  }
  return out.str();
}

ScalingFit fit_used(std::vector<ScalingPoint> points) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : points) {
    if (!p.used) continue;
    x.push_back(p.x);
    y.push_back(p.y);
  }
  LineFit line = fit_line(x, y);
  return {line.slope, line.intercept, line.r_squared, std::move(points)};
}

}  // namespace

ScalingFit loglaw_exponent(const MapFamily& family, PhasePoint y, const Sampler& mu0,
                           const RadiiSchedule& schedule, const LoglawOptions& options) {
  if (options.n_samples < 30) throw InvalidInput("loglaw_exponent: need at least 30 samples");
  if (!mu0) throw InvalidInput("loglaw_exponent: empty sampler");
  std::vector<double> radii = schedule.radii();
  std::size_t K = radii.size();
  std::vector<HitResult> hits(options.n_samples * K);
  parallel_for(options.n_samples, options.threads, [&](std::size_t s) {
    SplitMix64 rng(stream_seed(options.seed, s));
    PhasePoint x0 = mu0(rng);
    OrbitOptions orbit{options.jitter, rng()};
    auto result = hitting_times(family, x0, y, radii, options.n_max, orbit);
    std::copy(result.begin(), result.end(), hits.begin() + static_cast<std::ptrdiff_t>(s * K));
  });

  std::vector<ScalingPoint> points(K);
  std::size_t usable = 0;
  for (std::size_t k = 0; k < K; ++k) {
    auto& p = points[k];
    p.radius = radii[k];
    p.x = -std::log(radii[k]);
    p.samples = options.n_samples;
    double sum = 0.0;
    for (std::size_t s = 0; s < options.n_samples; ++s) {
      const auto& h = hits[s * K + k];
      if (h.hit()) {
        sum += std::log1p(static_cast<double>(h.steps));
      } else {
        ++p.censored;
      }
    }
    std::size_t uncensored = p.samples - p.censored;
    p.y = uncensored > 0 ? sum / static_cast<double>(uncensored) : 0.0;
    p.used = static_cast<double>(uncensored) >= options.min_uncensored * static_cast<double>(p.samples);
    if (p.used) ++usable;
  }
  if (usable < 2) {
    throw InsufficientData("loglaw_exponent: horizon too short, fewer than two radii have enough "
                           "uncensored samples:" + censoring_table(points));
  }
  return fit_used(std::move(points));
}

ScalingFit local_dimension(const EmpiricalMeasure& cloud, PhasePoint y,
                           const RadiiSchedule& schedule) {
  if (cloud.size() < kMinCloudSize) {
    throw InsufficientData("local_dimension: cloud needs at least 10000 points");
  }
  std::vector<double> radii = schedule.radii();
  std::vector<std::size_t> counts(radii.size(), 0);
  std::vector<double> masses(radii.size(), 0.0);
  auto pts = cloud.points();
  auto weights = cloud.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = phase_distance(cloud.space(), pts[i], y);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (d < radii[k]) {
        ++counts[k];
        masses[k] += weights[i];
      }
    }
  }
  double total = cloud.total_mass();
  std::vector<ScalingPoint> points(radii.size());
  std::size_t usable = 0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    auto& p = points[k];
    p.radius = radii[k];
    p.x = std::log(radii[k]);
    p.samples = counts[k];
    p.used = counts[k] >= kMinBallPoints && masses[k] > 0.0;
    p.y = masses[k] > 0.0 ? std::log(masses[k] / total) : -std::numeric_limits<double>::infinity();
    if (p.used) ++usable;
  }
  if (usable < kMinDimensionRadii) {
    std::ostringstream msg;
    msg << "local_dimension: only " << usable << " radii hold at least " << kMinBallPoints
        << " points";
    throw InsufficientData(msg.str());
  }
  return fit_used(std::move(points));
}

EmpiricalMeasure equilibrium_cloud(const MapFamily& family, std::size_t n_points,
                                   std::size_t burn_in, std::uint64_t seed, unsigned threads,
                                   double jitter) {
  if (burn_in < 1) throw InvalidInput("equilibrium_cloud: burn_in must be >= 1");
  if (n_points < 1) throw InvalidInput("equilibrium_cloud: need at least one point");
  std::vector<PhasePoint> points(n_points);
  PhaseSpace space = family.space();
  parallel_for(n_points, threads, [&](std::size_t i) {
    SplitMix64 rng(stream_seed(seed, i));
    PhasePoint x0 = sample_lebesgue(space, rng);
    Orbit path(family, x0, {jitter, rng()});
    for (std::size_t k = 0; k < burn_in; ++k) path.advance();
    points[i] = path.point();
  });
  return EmpiricalMeasure::uniform(space, std::move(points));
}

double target_radius(const RadiusRule& rule, std::size_t j) {
  if (j == 0) return std::numeric_limits<double>::infinity();
  if (const auto* s = std::get_if<RadiiSchedule>(&rule)) {
    if (j > s->count()) throw InvalidInput("target_radius: schedule is shorter than the horizon");
    return (*s)[j - 1];
  }
  return std::pow(static_cast<double>(j), -std::get<PowerRadii>(rule).beta);
}

double target_weight(double distance, double inner, double outer) {
  if (distance <= inner) return 1.0;
  // No ramp over an unbounded band: phi_1 is the indicator of B(y, R_1).
  if (distance >= outer || std::isinf(outer)) return 0.0;
  return (outer - distance) / (outer - inner);
}

namespace {

// Adds phi_j(T^(j) x0) to out[j - 1] for j = 1..n.
void accumulate_targets(const MapFamily& family, PhasePoint x0, PhasePoint y,
                        const std::vector<double>& radius, OrbitOptions options,
                        std::vector<double>& out) {
  PhaseSpace space = family.space();
  Orbit path(family, x0, options);
  for (std::size_t j = 1; j < radius.size(); ++j) {
    path.advance();
    out[j - 1] += target_weight(phase_distance(space, path.point(), y), radius[j], radius[j - 1]);
  }
}

}  // namespace

BorelCantelliResult borel_cantelli_ratio(const MapFamily& family, PhasePoint y,
                                         const RadiusRule& rule, const Sampler& mu0,
                                         const BorelCantelliOptions& options) {
  std::size_t n = options.n_steps;
  if (n < 1) throw InvalidInput("borel_cantelli_ratio: need at least one step");
  if (options.n_samples < 1 || options.n_held_out < 1) {
    throw InvalidInput("borel_cantelli_ratio: need samples and held-out orbits");
  }
  if (const auto* p = std::get_if<PowerRadii>(&rule); p && !(p->beta > 0.0)) {
    throw InvalidInput("borel_cantelli_ratio: beta must be positive");
  }
  std::vector<double> radius(n + 1);
  for (std::size_t j = 0; j <= n; ++j) radius[j] = target_radius(rule, j);

  // Fixed blocks keep the summation order independent of the thread count.
  constexpr std::size_t kBlock = 8;
  std::size_t n_blocks = (options.n_samples + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> block_sums(n_blocks);
  std::uint64_t sample_seed = stream_seed(options.seed, 0);
  parallel_for(n_blocks, options.threads, [&](std::size_t b) {
    std::vector<double> sums(n, 0.0);
    for (std::size_t s = b * kBlock; s < std::min(options.n_samples, (b + 1) * kBlock); ++s) {
      SplitMix64 rng(stream_seed(sample_seed, s));
      PhasePoint x0 = mu0(rng);
      accumulate_targets(family, x0, y, radius, {options.jitter, rng()}, sums);
    }
    block_sums[b] = std::move(sums);
  });

  BorelCantelliResult result;
  result.expected.assign(n, 0.0);
  for (const auto& sums : block_sums) {
    for (std::size_t j = 0; j < n; ++j) result.expected[j] += sums[j];
  }
  double running = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    running += result.expected[j] / static_cast<double>(options.n_samples);
    result.expected[j] = running;
  }
  if (!(running > 0.0)) {
    throw InsufficientData("borel_cantelli_ratio: degenerate target, E(Z_n) = 0 for every n");
  }

  std::uint64_t held_seed = stream_seed(options.seed, 1);
  result.ratios.resize(options.n_held_out);
  parallel_for(options.n_held_out, options.threads, [&](std::size_t o) {
    SplitMix64 rng(stream_seed(held_seed, o));
    PhasePoint x0 = mu0(rng);
    std::vector<double> z(n, 0.0);
    accumulate_targets(family, x0, y, radius, {options.jitter, rng()}, z);
    double count = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      count += z[j];
      double e = result.expected[j];
      z[j] = e > 0.0 ? count / e : std::numeric_limits<double>::quiet_NaN();
    }
    result.ratios[o] = std::move(z);
  });
  return result;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Comparison compare(const ScalingFit& loglaw, const ScalingFit& dimension, double tol) {
  if (!(tol >= 0.0)) throw InvalidInput("compare: tolerance must be >= 0");
  Comparison c;
  c.loglaw = loglaw;
  c.dimension = dimension;
  c.tolerance = tol;
  c.difference = std::fabs(loglaw.slope - dimension.slope);
  if (loglaw.r_squared < kMinFitQuality || dimension.r_squared < kMinFitQuality) {
    c.verdict = Verdict::inconclusive;
  } else {
    c.verdict = c.difference <= tol ? Verdict::pass : Verdict::fail;
  }
  std::ostringstream out;
  out << "loglaw slope " << loglaw.slope << " (r2 " << loglaw.r_squared << "), dimension slope "
      << dimension.slope << " (r2 " << dimension.r_squared << "), |diff| " << c.difference
      << " vs tol " << tol << ": " << to_string(c.verdict);
  std::size_t censored = 0;
  std::size_t samples = 0;
  for (const auto& p : loglaw.points) {
    censored += p.censored;
    samples += p.samples;
  }
  if (samples > 0) out << "; censored " << censored << " of " << samples << " hitting times";
  c.report = out.str();
  return c;
}

}  // namespace loglaw
