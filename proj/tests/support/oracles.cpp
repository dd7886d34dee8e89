#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "loglaw/regression.hpp"

namespace loglaw::oracle {

double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                   const std::vector<double>& c) {
  std::size_t m = A.size();
  std::size_t n = c.size();
  // Tableau rows: m constraints with slacks, then the objective row.
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw std::invalid_argument("simplex_max: needs b >= 0");
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1.0;
    T[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];

  constexpr double kEps = 1e-12;
  for (int iter = 0; iter < 1000000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (T[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) return T[m][n + m];
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (T[i][enter] > kEps) {
        double ratio = T[i][n + m] / T[i][enter];
        bool tie = leave < m && std::fabs(ratio - best) <= kEps;
        if (leave == m || ratio < best - kEps || (tie && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex_max: unbounded");
    double pivot = T[leave][enter];
    for (double& v : T[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || T[i][enter] == 0.0) continue;
      double factor = T[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= factor * T[leave][j];
    }
    basis[leave] = enter;
  }
  throw std::runtime_error("simplex_max: iteration cap");
}

double cycle_dual_norm_lp(std::span<const double> node_mass) {
  std::size_t n = node_mass.size();
  double h = 1.0 / static_cast<double>(n);
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    A.push_back(row);
    b.push_back(2.0);
  }
  if (n > 1) {
    std::size_t edges = n == 2 ? 1 : n;
    for (std::size_t i = 0; i < edges; ++i) {
      std::size_t j = (i + 1) % n;
      std::vector<double> up(n, 0.0);
      up[j] += 1.0;
      up[i] -= 1.0;
      A.push_back(up);
      b.push_back(h);
      std::vector<double> down(n, 0.0);
      down[i] += 1.0;
      down[j] -= 1.0;
      A.push_back(down);
      b.push_back(h);
    }
  }
  std::vector<double> c(node_mass.begin(), node_mass.end());
  double shift = 0.0;
  for (double m : node_mass) shift += m;
  return simplex_max(A, b, c) - shift;
}

double box_counting_dimension(const EmpiricalMeasure& cloud, int k_min, int k_max) {
  std::vector<double> x;
  std::vector<double> y;
  bool solenoid = cloud.space() == PhaseSpace::solenoid;
  for (int k = k_min; k <= k_max; ++k) {
    double scale = std::ldexp(1.0, k);
    std::unordered_set<std::uint64_t> boxes;
    for (const auto& p : cloud.points()) {
      auto a = static_cast<std::uint64_t>(std::floor(p.base.value() * scale));
      std::uint64_t key = a;
      if (solenoid) {
        auto u = static_cast<std::uint64_t>(std::floor((p.fiber.u + 1.0) * scale));
        auto v = static_cast<std::uint64_t>(std::floor((p.fiber.v + 1.0) * scale));
        key = (a << 42) ^ (u << 21) ^ v;
      }
      boxes.insert(key);
    }
    x.push_back(std::log(scale));
    y.push_back(std::log(static_cast<double>(boxes.size())));
  }
  return fit_line(x, y).slope;
}

double ks_uniform(const EmpiricalMeasure& cloud) {
  std::vector<double> xs;
  for (const auto& p : cloud.points()) xs.push_back(p.base.value());
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - xs[i], xs[i] - static_cast<double>(i) / n));
  }
  return d;
}

std::vector<double> doubling_push(std::span<const double> f) {
  std::size_t n = f.size();
  std::vector<double> g(n, 0.0);
  // Cell j of the image has preimage halves j/2n and (j+n)/2n, which are halves
  // of cells floor(j/2) and floor((j+n)/2).
  for (std::size_t j = 0; j < n; ++j) g[j] = 0.5 * (f[j / 2] + f[(j + n) / 2]);
  return g;
}

}  // namespace loglaw::oracle
