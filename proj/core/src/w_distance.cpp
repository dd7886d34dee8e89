// Bounded-Lipschitz distance on the circle grid.
//
// The grid problem  max sum m_i g_i,  |g_i| <= 1,  |g_i - g_{i+1}| <= h  is the
// LP dual of a min-cost transshipment on the wheel graph: the n cycle nodes
// joined by edges of cost h, plus a hub joined to every node at cost 1. With
// the flow t on the closing edge (n-1 -> 0) fixed, what remains is a path, and
// writing U_i for the cumulative mass sent to the hub from nodes 0..i the path
// cost is
//
//     sum_i |U_i - U_{i-1}| + h sum_{i<n-1} |F_i - U_i|,   U_{-1} = 0, U_{n-1} = F_{n-1}
//
// with F the cumulative node masses. That is a chain of convex piecewise-linear
// terms, minimized exactly by a slope-clamping dynamic program in O(n log n).
// The total cost is convex in t, so the closing-edge flow is found by
// golden-section search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory_resource>
#include <utility>

#include "loglaw/errors.hpp"
#include "loglaw/measures.hpp"

namespace loglaw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Convex piecewise-linear function: slope `left_slope_` at -infinity plus
// nonnegative slope increments at breakpoints.
class ConvexPwl {
 public:
  explicit ConvexPwl(std::pmr::memory_resource* arena) : breaks_(arena) {}

  void reset_to_abs() {
    breaks_.clear();
    breaks_[0.0] = 2.0;
    left_slope_ = -1.0;
    total_ = 2.0;
  }

  // C(u) += weight * |u - at|
  void add_abs(double at, double weight) {
    breaks_[at] += 2.0 * weight;
    left_slope_ -= weight;
    total_ += 2.0 * weight;
  }

  // C <- inf_v C(v) + |u - v|, i.e. slopes clamped to [-1, 1]. Returns [a, b]
  // such that the minimizing v for a given u is clamp(u, a, b).
  std::pair<double, double> clamp_slopes() {
    double lo = -kInf;
    double hi = kInf;
    if (left_slope_ < -1.0) {
      double s = left_slope_;
      while (!breaks_.empty()) {
        auto it = breaks_.begin();
        double w = it->second;
        if (s + w < -1.0) {
          s += w;
          total_ -= w;
          breaks_.erase(it);
          continue;
        }
        lo = it->first;
        double keep = s + w + 1.0;
        total_ -= w - keep;
        if (keep <= 0.0) {
          breaks_.erase(it);
        } else {
          it->second = keep;
        }
        break;
      }
      left_slope_ = -1.0;
    }
    double s = left_slope_ + total_;
    if (s > 1.0) {
      while (!breaks_.empty()) {
        auto it = std::prev(breaks_.end());
        double w = it->second;
        if (s - w > 1.0) {
          s -= w;
          total_ -= w;
          breaks_.erase(it);
          continue;
        }
        hi = it->first;
        double keep = 1.0 - (s - w);
        total_ -= w - keep;
        if (keep <= 0.0) {
          breaks_.erase(it);
        } else {
          it->second = keep;
        }
        break;
      }
    }
    return {lo, hi};
  }

 private:
  std::pmr::map<double, double> breaks_;
  double left_slope_ = -1.0;
  double total_ = 0.0;
};

class PathSolver {
 public:
  explicit PathSolver(std::size_t n)
      : clamps_(n), buffer_(128 * (n + 8)), arena_(buffer_.data(), buffer_.size()) {}

  // Minimal path cost for cumulative masses F (F_i shifted by `shift` for i < n-1).
  double solve(std::span<const double> cumulative, double shift, double h) {
    std::size_t n = cumulative.size();
    auto F = [&](std::size_t i) { return i + 1 < n ? cumulative[i] + shift : cumulative[i]; };
    if (n == 1) return std::fabs(F(0));

    arena_.release();
    ConvexPwl cost(&arena_);
    cost.reset_to_abs();
    cost.add_abs(F(0), h);
    for (std::size_t i = 1; i < n; ++i) {
      clamps_[i] = cost.clamp_slopes();
      if (i + 1 < n) cost.add_abs(F(i), h);
    }

    double u = F(n - 1);
    double total = 0.0;
    for (std::size_t i = n - 1; i >= 1; --i) {
      double prev = std::clamp(u, clamps_[i].first, clamps_[i].second);
      total += std::fabs(u - prev);
      if (i + 1 < n) total += h * std::fabs(F(i) - u);
      u = prev;
    }
    total += std::fabs(u) + h * std::fabs(F(0) - u);
    return total;
  }

 private:
  std::vector<std::pair<double, double>> clamps_;
  std::vector<std::byte> buffer_;
  std::pmr::monotonic_buffer_resource arena_;
};

}  // namespace

double cycle_dual_norm(std::span<const double> node_mass) {
  std::size_t n = node_mass.size();
  if (n == 0) throw InvalidInput("cycle_dual_norm: no nodes");
  for (double m : node_mass) {
    if (!std::isfinite(m)) throw InvalidInput("cycle_dual_norm: non-finite mass");
  }
  double variation = 0.0;
  for (double m : node_mass) variation += std::fabs(m);
  if (variation == 0.0) return 0.0;

  double h = 1.0 / static_cast<double>(n);
  // Orient so the first nonzero mass is positive; W(mu, nu) and W(nu, mu) then
  // run the identical computation.
  double sign = 1.0;
  for (double m : node_mass) {
    if (m != 0.0) {
      sign = m > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  std::vector<double> cumulative(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    running += sign * node_mass[i];
    cumulative[i] = running;
  }
  if (n <= 2) {
    // The closing edge duplicates an existing one; the path is exact.
    PathSolver solver(n);
    return solver.solve(cumulative, 0.0, h);
  }

  PathSolver solver(n);
  auto value = [&](double t) { return h * std::fabs(t) + solver.solve(cumulative, t, h); };

  // Golden-section search for the convex minimum over the closing-edge flow.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = -variation;
  double hi = variation;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  double best = std::min({value(0.0), f1, f2});
  while (hi - lo > 1e-14 * variation) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = value(x1);
      best = std::min(best, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = value(x2);
      best = std::min(best, f2);
    }
  }
  return best;
}

std::vector<double> node_masses(const Measure& mu, std::size_t n_nodes) {
  if (n_nodes < 2) throw InvalidInput("node_masses: need at least two nodes");
  std::vector<double> mass(n_nodes, 0.0);
  if (const auto* cloud = std::get_if<EmpiricalMeasure>(&mu)) {
    if (cloud->space() != PhaseSpace::circle) {
      throw InvalidInput("w_distance: measure does not live on the circle; project it first");
    }
    auto points = cloud->points();
    auto weights = cloud->weights();
    double n = static_cast<double>(n_nodes);
    for (std::size_t p = 0; p < points.size(); ++p) {
      double scaled = points[p].base.value() * n;
      auto k = static_cast<std::size_t>(scaled);
      if (k >= n_nodes) k = n_nodes - 1;
      double theta = scaled - static_cast<double>(k);
      mass[k] += weights[p] * (1.0 - theta);
      mass[(k + 1) % n_nodes] += weights[p] * theta;
    }
    return mass;
  }

  // Cells and node intervals are merged on the common lattice 1/(n_cells * n_nodes);
  // each overlap segment is integrated exactly against the two hats it touches.
  const auto& density = std::get<GridDensity>(mu);
  std::uint64_t n_cells = density.n_cells();
  std::uint64_t nodes = n_nodes;
  std::uint64_t end_all = n_cells * nodes;
  double scale = 1.0 / static_cast<double>(end_all);
  std::uint64_t pos = 0;
  std::uint64_t cell = 0;
  std::uint64_t node = 0;
  while (pos < end_all) {
    std::uint64_t cell_end = (cell + 1) * nodes;
    std::uint64_t node_end = (node + 1) * n_cells;
    std::uint64_t end = std::min(cell_end, node_end);
    double seg_mass = density[cell] * static_cast<double>(end - pos) * scale;
    double theta = (0.5 * static_cast<double>(pos + end) - static_cast<double>(node * n_cells)) /
                   static_cast<double>(n_cells);
    mass[node] += seg_mass * (1.0 - theta);
    mass[(node + 1) % n_nodes] += seg_mass * theta;
    pos = end;
    if (end == cell_end) ++cell;
    if (end == node_end) ++node;
  }
  return mass;
}

double w_distance(const Measure& mu, const Measure& nu, std::size_t n_nodes) {
  if (space_of(mu) != PhaseSpace::circle || space_of(nu) != PhaseSpace::circle) {
    throw InvalidInput("w_distance: both measures must live on the circle");
  }
  auto a = node_masses(mu, n_nodes);
  auto b = node_masses(nu, n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) a[i] -= b[i];
  return cycle_dual_norm(a);
}

}  // namespace loglaw
