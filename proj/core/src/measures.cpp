#include "loglaw/measures.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "loglaw/errors.hpp"

namespace loglaw {

std::string_view to_string(PhaseSpace space) noexcept {
  return space == PhaseSpace::circle ? "circle" : "solenoid";
}

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite value");
  }
}

void require_same_grid(const GridDensity& a, const GridDensity& b) {
  if (a.n_cells() != b.n_cells()) throw InvalidInput("GridDensity: mismatched n_cells");
}

}  // namespace

GridDensity::GridDensity(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("GridDensity: n_cells must be positive");
  require_finite(values_, "GridDensity");
}

GridDensity GridDensity::lebesgue(std::size_t n_cells) {
  return GridDensity(std::vector<double>(n_cells, 1.0));
}

GridDensity GridDensity::from_function(std::size_t n_cells, const std::function<double(double)>& f) {
  if (n_cells == 0) throw InvalidInput("GridDensity: n_cells must be positive");
  // Gauss-Legendre nodes and weights on [-1, 1]
  static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
  std::vector<double> values(n_cells);
  double h = 1.0 / static_cast<double>(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    double mid = (static_cast<double>(i) + 0.5) * h;
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) acc += weights[q] * f(mid + 0.5 * h * nodes[q]);
    values[i] = 0.5 * acc;
  }
  return GridDensity(std::move(values));
}

double GridDensity::total_mass() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double GridDensity::at(double x) const noexcept {
  auto n = values_.size();
  auto i = static_cast<std::size_t>(wrap_unit(x) * static_cast<double>(n));
  return values_[std::min(i, n - 1)];
}

GridDensity& GridDensity::operator+=(const GridDensity& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridDensity& GridDensity::operator-=(const GridDensity& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridDensity& GridDensity::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

EmpiricalMeasure::EmpiricalMeasure(PhaseSpace space, std::vector<PhasePoint> points,
                                   std::vector<double> weights)
    : space_(space), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) {
    throw InvalidInput("EmpiricalMeasure: points and weights differ in length");
  }
  require_finite(weights_, "EmpiricalMeasure weights");
  for (double w : weights_) {
    if (w < 0.0) throw InvalidInput("EmpiricalMeasure: negative weight");
  }
  for (const auto& p : points_) {
    if (!std::isfinite(p.fiber.u) || !std::isfinite(p.fiber.v)) {
      throw InvalidInput("EmpiricalMeasure: non-finite point");
    }
    if (space_ == PhaseSpace::solenoid && norm(p.fiber) > 1.0 + 1e-12) {
      throw InvalidInput("EmpiricalMeasure: fiber coordinate outside the unit disc");
    }
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(PhaseSpace space, std::vector<PhasePoint> points) {
  if (points.empty()) throw InvalidInput("EmpiricalMeasure: empty cloud");
  std::vector<double> weights(points.size(), 1.0 / static_cast<double>(points.size()));
  return EmpiricalMeasure(space, std::move(points), std::move(weights));
}

EmpiricalMeasure EmpiricalMeasure::dirac(PhaseSpace space, PhasePoint at) {
  return EmpiricalMeasure(space, {at}, {1.0});
}

double EmpiricalMeasure::total_mass() const noexcept {
  // Neumaier summation: uniform clouds of 1e5 points should report 1 to the last bit.
  double sum = 0.0;
  double carry = 0.0;
  for (double w : weights_) {
    double t = sum + w;
    carry += std::fabs(sum) >= std::fabs(w) ? (sum - t) + w : (w - t) + sum;
    sum = t;
  }
  return sum + carry;
}

EmpiricalMeasure EmpiricalMeasure::base_marginal() const {
  std::vector<PhasePoint> projected;
  projected.reserve(points_.size());
  for (const auto& p : points_) projected.push_back({p.base, {}});
  return EmpiricalMeasure(PhaseSpace::circle, std::move(projected), weights_);
}

PhaseSpace space_of(const Measure& mu) noexcept {
  if (const auto* cloud = std::get_if<EmpiricalMeasure>(&mu)) return cloud->space();
  return PhaseSpace::circle;
}

double total_mass(const Measure& mu) noexcept {
  return std::visit([](const auto& m) { return m.total_mass(); }, mu);
}

double lip_norm(std::span<const double> samples, double spacing, bool periodic) {
  if (samples.size() < 2) throw InvalidInput("lip_norm: need at least two nodes");
  if (!(spacing > 0.0)) throw InvalidInput("lip_norm: spacing must be positive");
  require_finite(samples, "lip_norm");
  double sup = 0.0;
  double lip = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sup = std::max(sup, std::fabs(samples[i]));
    if (i + 1 < samples.size()) {
      lip = std::max(lip, std::fabs(samples[i + 1] - samples[i]) / spacing);
    }
  }
  if (periodic) lip = std::max(lip, std::fabs(samples.front() - samples.back()) / spacing);
  return std::max(sup, lip);
}

double w11_norm(const GridDensity& f) {
  auto v = f.values();
  auto n = v.size();
  if (n < 2) throw InvalidInput("w11_norm: need at least two cells");
  double l1 = 0.0;
  double variation = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    l1 += std::fabs(v[i]);
    variation += std::fabs(v[(i + 1) % n] - v[i]);
  }
  return l1 / static_cast<double>(n) + variation;
}

double integrate(const std::function<double(double)>& g, const Measure& mu) {
  if (const auto* density = std::get_if<GridDensity>(&mu)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < density->n_cells(); ++i) {
      acc += g(density->cell_midpoint(i)) * (*density)[i];
    }
    return acc * density->cell_width();
  }
  const auto& cloud = std::get<EmpiricalMeasure>(mu);
  double acc = 0.0;
  auto points = cloud.points();
  auto weights = cloud.weights();
  for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * g(points[i].base.value());
  return acc;
}

double integrate(const std::function<double(const PhasePoint&)>& g, const EmpiricalMeasure& mu) {
  double acc = 0.0;
  auto points = mu.points();
  auto weights = mu.weights();
  for (std::size_t i = 0; i < points.size(); ++i) acc += weights[i] * g(points[i]);
  return acc;
}

}  // namespace loglaw
