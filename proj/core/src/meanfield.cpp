#include "loglaw/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "loglaw/errors.hpp"

namespace loglaw {

namespace {

double cos2pi(double x) { return std::cos(kTwoPi * x); }
double sin2pi(double x) { return std::sin(kTwoPi * x); }
double neg_sin2pi(double x) { return -std::sin(kTwoPi * x); }

double abs_mass(const Measure& mu) {
  if (const auto* f = std::get_if<GridDensity>(&mu)) {
    double sum = 0.0;
    for (double v : f->values()) sum += std::fabs(v);
    return sum / static_cast<double>(f->n_cells());
  }
  double sum = 0.0;
  for (double w : std::get<EmpiricalMeasure>(mu).weights()) sum += std::fabs(w);
  return sum;
}

}  // namespace

Coupling Coupling::sine() {
  Coupling c;
  c.name_ = "sin";
  c.h_ = [](double x, double y) { return std::sin(kTwoPi * (y - x)); };
  c.terms_ = {{cos2pi, sin2pi}, {neg_sin2pi, cos2pi}};
  c.sup_abs_ = 1.0;
  c.sup_dx_ = kTwoPi;
  return c;
}

Coupling Coupling::general(std::string name, std::function<double(double, double)> h) {
  if (!h) throw InvalidInput("Coupling: empty kernel");
  Coupling c;
  c.name_ = std::move(name);
  c.h_ = std::move(h);
  constexpr int kGrid = 256;
  constexpr double kStep = 1e-5;
  for (int i = 0; i < kGrid; ++i) {
    double x = (i + 0.5) / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      double y = (j + 0.5) / kGrid;
      double v = c.h_(x, y);
      if (!std::isfinite(v)) throw InvalidInput("Coupling: kernel is not finite");
      c.sup_abs_ = std::max(c.sup_abs_, std::fabs(v));
      double dx = (c.h_(x + kStep, y) - c.h_(x - kStep, y)) / (2.0 * kStep);
      c.sup_dx_ = std::max(c.sup_dx_, std::fabs(dx));
    }
  }
  return c;
}

MeanFieldConfig::MeanFieldConfig(ExpandingCircleMap base, Coupling coupling, double delta,
                                 Representation representation)
    : base_(base), coupling_(std::move(coupling)), delta_(delta), representation_(representation) {
  if (!std::isfinite(delta_) || delta_ < 0.0) throw ConfigError("mean field: delta must be >= 0");
  if (delta_ > 0.0 && delta_ >= delta_max()) {
    std::ostringstream msg;
    msg << "coupling too strong: delta = " << delta_ << " >= delta_max = " << delta_max()
        << " (need delta * sup|dh/dx| < 1/2)";
    throw ConfigError(msg.str());
  }
  if (const auto* d = std::get_if<DensityRepresentation>(&representation_)) {
    if (d->n_cells < 2) throw ConfigError("mean field: n_cells must be >= 2");
  } else {
    auto n = std::get<ParticleRepresentation>(representation_).n_particles;
    if (n < 1) throw ConfigError("mean field: n_particles must be >= 1");
    if (!coupling_.separable() && n > kGeneralKernelParticleCap) {
      throw ConfigError("mean field: too many particles for a non-separable kernel");
    }
  }
}

double MeanFieldConfig::delta_max() const noexcept {
  double s = coupling_.sup_dx();
  return s > 0.0 ? 0.5 / s : std::numeric_limits<double>::infinity();
}

double mean_displacement(double x, const GlobalState& state, const MeanFieldConfig& config) {
  if (config.delta() == 0.0) return 0.0;
  const auto& h = config.coupling();
  return config.delta() * integrate([&](double y) { return h(x, y); }, state.measure);
}

CirclePoint phi(CirclePoint x, const GlobalState& state, const MeanFieldConfig& config) {
  return CirclePoint(x.value() + mean_displacement(x.value(), state, config));
}

DisplacementField::DisplacementField(const Measure& mu, const MeanFieldConfig& config)
    : delta_(config.delta()), coupling_(&config.coupling()) {
  if (space_of(mu) != PhaseSpace::circle) {
    throw InvalidInput("mean field: states live on the circle");
  }
  bound_ = delta_ * coupling_->sup_abs() * abs_mass(mu) * (1.0 + 1e-12);
  if (delta_ == 0.0) return;
  if (coupling_->separable()) {
    for (const auto& term : coupling_->terms()) moments_.push_back(integrate(term.v, mu));
  } else if (const auto* f = std::get_if<GridDensity>(&mu)) {
    std::size_t n = f->n_cells();
    table_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      double x = static_cast<double>(j) / static_cast<double>(n);
      table_[j] = delta_ * integrate([&](double y) { return (*coupling_)(x, y); }, mu);
    }
  } else {
    cloud_ = std::make_shared<const EmpiricalMeasure>(std::get<EmpiricalMeasure>(mu));
  }
}

double DisplacementField::operator()(double x) const {
  if (delta_ == 0.0) return 0.0;
  if (!moments_.empty()) {
    double sum = 0.0;
    const auto& terms = coupling_->terms();
    for (std::size_t k = 0; k < terms.size(); ++k) sum += moments_[k] * terms[k].u(x);
    return delta_ * sum;
  }
  if (!table_.empty()) {
    double n = static_cast<double>(table_.size());
    double t = wrap_unit(x) * n;
    auto j = static_cast<std::size_t>(t);
    if (j >= table_.size()) j = table_.size() - 1;
    double frac = t - static_cast<double>(j);
    double next = table_[(j + 1) % table_.size()];
    return table_[j] + frac * (next - table_[j]);
  }
  if (cloud_) {
    double sum = 0.0;
    auto points = cloud_->points();
    auto weights = cloud_->weights();
    for (std::size_t i = 0; i < points.size(); ++i) {
      sum += weights[i] * (*coupling_)(x, points[i].base.value());
    }
    return delta_ * sum;
  }
  return 0.0;
}

double DisplacementField::sup_distance(const DisplacementField& other, std::size_t nodes) const {
  if (nodes == 0) throw InvalidInput("sup_distance: need at least one node");
  double sup = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    double x = static_cast<double>(j) / static_cast<double>(nodes);
    sup = std::max(sup, std::fabs((*this)(x) - other(x)));
  }
  return sup;
}

namespace {

// The offset s with (x - s) + field(x - s) = x. s - field(x - s) is increasing
// because |field'| <= 1/2.
double preimage_offset(const DisplacementField& field, double x) {
  double bound = field.bound();
  if (bound == 0.0) return 0.0;
  double lo = -bound;
  double hi = bound;
  auto residual = [&](double s) { return s - field(x - s); };
  if (residual(lo) > 0.0 || residual(hi) < 0.0) {
    std::ostringstream msg;
    msg << "mean field: cannot invert Phi at x = " << x << " (displacement bound " << bound << ")";
    throw ConvergenceError(msg.str(), std::max(residual(lo), -residual(hi)), 0);
  }
  double width = std::ldexp(bound, -62);
  while (hi - lo > width) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Integral of f over [x_j - s, x_j] (negated orientation for s < 0), walking
// cells so that tiny offsets keep full relative precision.
double integral_below_node(const GridDensity& f, std::size_t j, double s) {
  if (s == 0.0) return 0.0;
  std::size_t n = f.n_cells();
  double h = f.cell_width();
  double length = std::fabs(s);
  auto full = static_cast<std::size_t>(std::floor(length * static_cast<double>(n)));
  double partial = length - static_cast<double>(full) * h;
  if (partial < 0.0) {
    --full;
    partial += h;
  }
  double sum = 0.0;
  if (s > 0.0) {
    auto back = [&](std::size_t k) { return (j + n - k % n) % n; };
    for (std::size_t k = 1; k <= full; ++k) sum += f[back(k)] * h;
    sum += f[back(full + 1)] * partial;
    return sum;
  }
  for (std::size_t k = 0; k < full; ++k) sum += f[(j + k) % n] * h;
  sum += f[(j + full) % n] * partial;
  return -sum;
}

}  // namespace

GridDensity push_by_displacement(const GridDensity& f, const DisplacementField& field) {
  std::size_t n = f.n_cells();
  double h = f.cell_width();
  std::vector<double> below(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = static_cast<double>(j) * h;
    below[j] = integral_below_node(f, j, preimage_offset(field, x));
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double mass = f[j] * h + below[j] - below[(j + 1) % n];
    out[j] = mass * static_cast<double>(n);
  }
  return GridDensity(std::move(out));
}

MeanFieldSystem::MeanFieldSystem(MeanFieldConfig config) : config_(std::move(config)) {
  if (const auto* d = std::get_if<DensityRepresentation>(&config_.representation())) {
    n_cells_ = d->n_cells;
  } else {
    n_cells_ = DensityRepresentation{}.n_cells;
  }
}

const UlamMatrix& MeanFieldSystem::base_operator() const {
  std::call_once(built_, [this] {
    base_operator_ = std::make_unique<UlamMatrix>(ulam(config_.base().as_circle_map(), n_cells_));
  });
  return *base_operator_;
}

GlobalState sct_step(const GlobalState& state, const MeanFieldSystem& system) {
  const auto& config = system.config();
  if (const auto* f = std::get_if<GridDensity>(&state.measure)) {
    if (f->n_cells() != system.n_cells()) throw InvalidInput("sct_step: grid size mismatch");
    GridDensity moved = push(system.base_operator(), *f);
    if (config.delta() != 0.0) {
      moved = push_by_displacement(moved, DisplacementField(state.measure, config));
    }
    return {std::move(moved), state.time + 1};
  }
  const auto& cloud = std::get<EmpiricalMeasure>(state.measure);
  if (cloud.space() != PhaseSpace::circle) throw InvalidInput("sct_step: states live on the circle");
  const auto& T = config.base();
  std::vector<PhasePoint> points(cloud.points().begin(), cloud.points().end());
  if (config.delta() == 0.0) {
    for (auto& p : points) p.base = CirclePoint(T(p.base.value()));
  } else {
    DisplacementField field(state.measure, config);
    for (auto& p : points) {
      double y = T(p.base.value());
      p.base = CirclePoint(y + field(y));
    }
  }
  std::vector<double> weights(cloud.weights().begin(), cloud.weights().end());
  return {EmpiricalMeasure(PhaseSpace::circle, std::move(points), std::move(weights)),
          state.time + 1};
}

FixedPointResult fixed_point(const MeanFieldSystem& system, double tol,
                             std::size_t max_iterations) {
  if (!(tol > 0.0)) throw InvalidInput("fixed_point: tolerance must be positive");
  GlobalState state{GridDensity::lebesgue(system.n_cells()), 0};
  std::vector<double> residuals;
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    GlobalState next = sct_step(state, system);
    double residual = w11_norm(std::get<GridDensity>(next.measure) -
                               std::get<GridDensity>(state.measure));
    residuals.push_back(residual);
    state = std::move(next);
    if (residual < tol) {
      return {std::get<GridDensity>(std::move(state.measure)), residual, k, std::move(residuals)};
    }
  }
  throw ConvergenceError("fixed_point: no convergence within the iteration cap",
                         residuals.empty() ? 0.0 : residuals.back(), max_iterations);
}

InducedFamily::InducedFamily(std::shared_ptr<const MeanFieldSystem> system, GlobalState initial)
    : system_(std::move(system)) {
  if (!system_) throw InvalidInput("induced family: null system");
  const auto& config = system_->config();
  fields_.emplace_back(initial.measure, config);
  if (config.delta() == 0.0) return;
  GlobalState state = std::move(initial);
  for (std::size_t t = 1;; ++t) {
    if (t > kFixedPointStepCap) {
      throw ConvergenceError("induced family: state sequence does not settle",
                             fields_.back().sup_distance(fields_[fields_.size() - 2]), t - 1);
    }
    state = sct_step(state, *system_);
    DisplacementField next(state.measure, config);
    bool settled = next.sup_distance(fields_.back()) <= kSettleTolerance;
    fields_.push_back(std::move(next));
    if (settled) break;
  }
}

const DisplacementField& InducedFamily::field(std::size_t t) const {
  return fields_[std::min(t, fields_.size() - 1)];
}

PhasePoint InducedFamily::step(std::size_t index, const PhasePoint& p) const {
  if (index == 0) throw InvalidInput("induced family: indices start at 1");
  double y = system_->config().base()(p.base.value());
  return {CirclePoint(y + field(index - 1)(y)), {}};
}

std::string InducedFamily::descriptor() const {
  std::ostringstream out;
  const auto& config = system_->config();
  out << "mean-field induced (" << config.base().as_circle_map().name()
      << ", h=" << config.coupling().name() << ", delta=" << config.delta() << ")";
  return out.str();
}

std::optional<CircleMap> InducedFamily::base_map(std::size_t index) const {
  if (index == 0) throw InvalidInput("induced family: indices start at 1");
  ExpandingCircleMap T = system_->config().base();
  DisplacementField D = field(index - 1);
  std::ostringstream name;
  name << "induced[" << base_map_key(index) << "]";
  return CircleMap(
      name.str(),
      [T, D](double x) {
        double y = T.lift(x);
        return y + D(y);
      },
      T.degree());
}

std::size_t InducedFamily::base_map_key(std::size_t index) const {
  if (index == 0) return 0;
  return std::min(index - 1, fields_.size() - 1) + 1;
}

std::shared_ptr<const InducedFamily> induced_family(std::shared_ptr<const MeanFieldSystem> system,
                                                    GlobalState initial) {
  return std::make_shared<const InducedFamily>(std::move(system), std::move(initial));
}

}  // namespace loglaw
