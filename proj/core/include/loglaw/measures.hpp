#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loglaw/phase_space.hpp"

namespace loglaw {

/// Piecewise-constant signed density on the uniform partition of S^1 into
/// `n_cells` cells of width 1/n_cells. Cell i covers [i/n, (i+1)/n).
class GridDensity {
 public:
  explicit GridDensity(std::vector<double> values);

  /// The density of Lebesgue measure (all ones).
  static GridDensity lebesgue(std::size_t n_cells);
  /// Cell averages of f, by 4-point Gauss-Legendre quadrature on each cell.
  static GridDensity from_function(std::size_t n_cells, const std::function<double(double)>& f);

  std::size_t n_cells() const noexcept { return values_.size(); }
  double cell_width() const noexcept { return 1.0 / static_cast<double>(values_.size()); }
  double cell_midpoint(std::size_t i) const noexcept {
    return (static_cast<double>(i) + 0.5) * cell_width();
  }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Integral of the density: mean of the cell values.
  double total_mass() const noexcept;
  /// Value of the density at x (the value of the cell containing x).
  double at(double x) const noexcept;

  GridDensity& operator+=(const GridDensity& other);
  GridDensity& operator-=(const GridDensity& other);
  GridDensity& operator*=(double s);
  friend GridDensity operator+(GridDensity a, const GridDensity& b) { return a += b; }
  friend GridDensity operator-(GridDensity a, const GridDensity& b) { return a -= b; }
  friend GridDensity operator*(double s, GridDensity a) { return a *= s; }

 private:
  std::vector<double> values_;
};

/// Weighted point cloud in a phase space.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(PhaseSpace space, std::vector<PhasePoint> points, std::vector<double> weights);

  /// Equal weights summing to one.
  static EmpiricalMeasure uniform(PhaseSpace space, std::vector<PhasePoint> points);
  static EmpiricalMeasure dirac(PhaseSpace space, PhasePoint at);
  static EmpiricalMeasure dirac(double x) { return dirac(PhaseSpace::circle, circle_point(x)); }

  PhaseSpace space() const noexcept { return space_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const PhasePoint> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double total_mass() const noexcept;

  /// Image under the projection S^1 x D^2 -> S^1.
  EmpiricalMeasure base_marginal() const;

 private:
  PhaseSpace space_;
  std::vector<PhasePoint> points_;
  std::vector<double> weights_;
};

using Measure = std::variant<GridDensity, EmpiricalMeasure>;

PhaseSpace space_of(const Measure& mu) noexcept;
double total_mass(const Measure& mu) noexcept;

/// ||g||_Lip = max(Lip(g), sup|g|) for samples g_i = g(x_0 + i*spacing).
/// `periodic` includes the quotient between the last and the first node.
double lip_norm(std::span<const double> samples, double spacing, bool periodic);

/// lip_norm for samples at the nodes i/n of the circle.
inline double lip_norm(std::span<const double> samples) {
  return lip_norm(samples, 1.0 / static_cast<double>(samples.size()), true);
}

inline constexpr std::size_t kDefaultWNodes = 4096;

/// Exact optimum of  max sum_i m_i g_i  subject to |g_i| <= 1 and
/// |g_{i+1} - g_i| <= 1/n around the cycle of n nodes. This is the
/// bounded-Lipschitz dual norm of the node masses m.
double cycle_dual_norm(std::span<const double> node_mass);

/// Masses of the piecewise-linear hat basis on the n circle nodes i/n:
/// integrating any nodal piecewise-linear g against mu equals sum_i m_i g(i/n).
std::vector<double> node_masses(const Measure& mu, std::size_t n_nodes);

/// W(mu, nu) = sup{ |int g d(mu - nu)| : |g| <= 1, Lip(g) <= 1 } over test
/// functions that are piecewise linear on `n_nodes` circle nodes. The grid
/// optimum is a lower bound of the continuum value, off by O(1/n_nodes) per
/// unit of mass. Both measures must live on the circle.
double w_distance(const Measure& mu, const Measure& nu, std::size_t n_nodes = kDefaultWNodes);

/// ||f||_1 + ||f'||_1 with forward differences and wrap-around:
/// (1/n) sum|f_i| + sum|f_{i+1} - f_i|.
double w11_norm(const GridDensity& f);

/// int g dmu: weighted sum for point clouds, cell-midpoint rule for densities.
/// For clouds the integrand receives the base coordinate.
double integrate(const std::function<double(double)>& g, const Measure& mu);

/// Integral of an observable of the full phase point against a cloud.
double integrate(const std::function<double(const PhasePoint&)>& g, const EmpiricalMeasure& mu);

}  // namespace loglaw
