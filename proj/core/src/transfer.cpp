#include "loglaw/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "loglaw/errors.hpp"
#include "loglaw/parallel.hpp"
#include "loglaw/regression.hpp"

namespace loglaw {

UlamMatrix::UlamMatrix(std::size_t n_cells, std::vector<std::vector<Entry>> rows) {
  if (n_cells == 0 || rows.size() != n_cells) throw InvalidInput("UlamMatrix: bad row count");
  row_start_.reserve(n_cells + 1);
  row_start_.push_back(0);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    double sum = 0.0;
    for (const auto& e : row) {
      if (e.col >= n_cells || !(e.p >= 0.0)) throw InvalidInput("UlamMatrix: bad entry");
      sum += e.p;
    }
    if (!(sum > 0.0)) throw InvalidInput("UlamMatrix: empty row");
    for (const auto& e : row) {
      if (!entries_.empty() && entries_.size() > row_start_.back() && entries_.back().col == e.col) {
        entries_.back().p += e.p / sum;
      } else {
        entries_.push_back({e.col, e.p / sum});
      }
    }
    row_start_.push_back(entries_.size());
  }
}

UlamMatrix UlamMatrix::identity(std::size_t n_cells) {
  std::vector<std::vector<Entry>> rows(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) rows[i] = {{static_cast<std::uint32_t>(i), 1.0}};
  return UlamMatrix(n_cells, std::move(rows));
}

double UlamMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  for (const auto& e : row(i)) {
    if (e.col == j) return e.p;
  }
  return 0.0;
}

namespace {

std::uint32_t cell_of(double x, std::size_t n) {
  auto j = static_cast<std::size_t>(wrap_unit(x) * static_cast<double>(n));
  return static_cast<std::uint32_t>(std::min(j, n - 1));
}

std::vector<UlamMatrix::Entry> sampled_row(const CircleMap& map, std::size_t i, std::size_t n,
                                           std::size_t samples) {
  double h = 1.0 / static_cast<double>(n);
  double a = static_cast<double>(i) * h;
  std::vector<UlamMatrix::Entry> row;
  for (std::size_t s = 0; s < samples; ++s) {
    double x = a + (static_cast<double>(s) + 0.5) * h / static_cast<double>(samples);
    row.push_back({cell_of(map(x), n), 1.0});
  }
  return row;
}

// Smallest x in [lo, hi] with lift(x) >= target, to the last representable bit.
double invert_increasing(const CircleMap& map, double target, double lo, double hi) {
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (map.lift(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<UlamMatrix::Entry> exact_row(const CircleMap& map, std::size_t i, std::size_t n) {
  double nd = static_cast<double>(n);
  double a = static_cast<double>(i) / nd;
  double b = static_cast<double>(i + 1) / nd;
  double lift_a = map.lift(a);
  double lift_b = map.lift(b);
  if (!(lift_b > lift_a)) throw InvalidInput("ulam: lift is not increasing on a cell");

  std::vector<double> cuts{a};
  auto first = static_cast<long long>(std::floor(lift_a * nd)) + 1;
  auto last = static_cast<long long>(std::ceil(lift_b * nd)) - 1;
  for (long long k = first; k <= last; ++k) {
    double x = invert_increasing(map, static_cast<double>(k) / nd, cuts.back(), b);
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);

  std::vector<UlamMatrix::Entry> row;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double mid = 0.5 * (cuts[s] + cuts[s + 1]);
    row.push_back({cell_of(map.lift(mid), n), (cuts[s + 1] - cuts[s]) * nd});
  }
  return row;
}

}  // namespace

UlamMatrix ulam(const CircleMap& map, std::size_t n_cells, std::size_t samples_per_cell,
                UlamMethod method, unsigned threads) {
  if (n_cells < 2) throw InvalidInput("ulam: need at least two cells");
  if (samples_per_cell < 1) throw InvalidInput("ulam: need at least one sample per cell");
  bool exact = method == UlamMethod::exact || (method == UlamMethod::automatic && map.has_lift());
  if (exact && !map.has_lift()) throw InvalidInput("ulam: exact method needs a monotone lift");

  std::vector<std::vector<UlamMatrix::Entry>> rows(n_cells);
  parallel_for(n_cells, threads, [&](std::size_t i) {
    rows[i] = exact ? exact_row(map, i, n_cells) : sampled_row(map, i, n_cells, samples_per_cell);
  });
  return UlamMatrix(n_cells, std::move(rows));
}

GridDensity push(const UlamMatrix& P, const GridDensity& f) {
  if (P.n_cells() != f.n_cells()) throw InvalidInput("push: dimension mismatch");
  std::vector<double> out(f.n_cells(), 0.0);
  for (std::size_t i = 0; i < f.n_cells(); ++i) {
    double fi = f[i];
    if (fi == 0.0) continue;
    for (const auto& e : P.row(i)) out[e.col] += fi * e.p;
  }
  return GridDensity(std::move(out));
}

TransferSequence::TransferSequence(FamilyPtr family, std::size_t n_cells,
                                   std::size_t samples_per_cell, UlamMethod method)
    : family_(std::move(family)),
      n_cells_(n_cells),
      samples_per_cell_(samples_per_cell),
      method_(method) {
  if (!family_) throw InvalidInput("TransferSequence: null family");
  if (n_cells_ < 2) throw InvalidInput("TransferSequence: need at least two cells");
  if (!family_->base_map(1)) {
    throw InvalidInput("TransferSequence: family has no circle marginal");
  }
}

std::shared_ptr<const UlamMatrix> TransferSequence::matrix(std::size_t index) const {
  std::size_t key = family_->base_map_key(index);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto map = family_->base_map(index);
  if (!map) throw InvalidInput("TransferSequence: family has no circle marginal");
  auto built = std::make_shared<const UlamMatrix>(ulam(*map, n_cells_, samples_per_cell_, method_));
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(built)).first->second;
}

GridDensity sequential_push(const TransferSequence& ops, std::size_t j, std::size_t k,
                            const GridDensity& f) {
  if (j < 1 || k < j) throw InvalidInput("sequential_push: need 1 <= j <= k");
  if (f.n_cells() != ops.n_cells()) throw InvalidInput("sequential_push: dimension mismatch");
  GridDensity g = f;
  for (std::size_t i = j; i <= k; ++i) g = push(*ops.matrix(i), g);
  return g;
}

EquilibriumResult equilibrium(const TransferSequence& ops, double tol, std::size_t max_steps,
                              std::size_t w_nodes) {
  if (!(tol > 0.0)) throw InvalidInput("equilibrium: tolerance must be positive");
  GridDensity current = GridDensity::lebesgue(ops.n_cells());
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= max_steps; ++k) {
    GridDensity next = push(*ops.matrix(k), current);
    residual = w_distance(next, current, w_nodes);
    current = std::move(next);
    if (residual < tol) return {std::move(current), residual, k};
  }
  throw ConvergenceError("equilibrium: no convergence within the step cap", residual, max_steps);
}

double RateFit::ratio() const noexcept { return std::exp(slope); }

std::optional<RateFit> fit_exponential_tail(std::span<const std::size_t> steps,
                                            std::span<const double> values) {
  if (steps.size() != values.size()) throw InvalidInput("fit_exponential_tail: length mismatch");
  if (values.empty()) return std::nullopt;
  double peak = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) peak = std::max(peak, v);
  }
  double floor = kResolutionFloor * peak;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = values.size() / 2; i < values.size(); ++i) {
    if (std::isfinite(values[i]) && values[i] > floor) {
      x.push_back(static_cast<double>(steps[i]));
      y.push_back(std::log(values[i]));
    }
  }
  if (x.size() < kMinTailPoints) return std::nullopt;
  LineFit line = fit_line(x, y);
  return RateFit{line.slope, line.intercept, line.r_squared, static_cast<std::size_t>(x.front()),
                 x.size()};
}

namespace {

void finish_curve(ConvergenceCurve& curve) {
  double peak = 0.0;
  for (double v : curve.values) peak = std::max(peak, v);
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i] <= kResolutionFloor * peak) {
      curve.floor_reached_at = curve.steps[i];
      break;
    }
  }
  curve.fit = fit_exponential_tail(curve.steps, curve.values);
}

}  // namespace

ConvergenceCurve convergence_curve(const TransferSequence& ops, const GridDensity& f0,
                                   std::size_t n, const GridDensity* equilibrium_density,
                                   std::size_t w_nodes) {
  if (f0.n_cells() != ops.n_cells()) throw InvalidInput("convergence_curve: dimension mismatch");
  std::optional<GridDensity> computed;
  if (equilibrium_density == nullptr) {
    computed = equilibrium(ops, 1e-13, kEquilibriumStepCap, w_nodes).density;
    equilibrium_density = &*computed;
  }
  ConvergenceCurve curve;
  curve.norm = CurveNorm::w;
  GridDensity f = f0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) f = push(*ops.matrix(k), f);
    curve.steps.push_back(k);
    curve.values.push_back(w_distance(f, *equilibrium_density, w_nodes));
  }
  finish_curve(curve);
  return curve;
}

ConvergenceCurve loss_of_memory(const TransferSequence& ops, const GridDensity& g, std::size_t n) {
  if (g.n_cells() != ops.n_cells()) throw InvalidInput("loss_of_memory: dimension mismatch");
  if (std::fabs(g.total_mass()) > 1e-10) {
    throw InvalidInput("loss_of_memory: observable must have zero mean");
  }
  ConvergenceCurve curve;
  curve.norm = CurveNorm::w11;
  GridDensity f = g;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) f = push(*ops.matrix(k), f);
    curve.steps.push_back(k);
    curve.values.push_back(w11_norm(f));
  }
  finish_curve(curve);
  return curve;
}

}  // namespace loglaw
