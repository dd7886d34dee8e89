#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "loglaw/measures.hpp"
#include "loglaw/systems.hpp"

namespace loglaw {

/// Row-stochastic Ulam matrix: entry (i, j) is the fraction of cell i that the
/// map sends into cell j. Stored row-compressed.
class UlamMatrix {
 public:
  struct Entry {
    std::uint32_t col;
    double p;
  };

  /// Rows are given as lists of entries; each row is renormalized to sum to one.
  UlamMatrix(std::size_t n_cells, std::vector<std::vector<Entry>> rows);

  static UlamMatrix identity(std::size_t n_cells);

  std::size_t n_cells() const noexcept { return row_start_.size() - 1; }
  std::span<const Entry> row(std::size_t i) const noexcept {
    return {entries_.data() + row_start_[i], entries_.data() + row_start_[i + 1]};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept;
  std::size_t nonzeros() const noexcept { return entries_.size(); }

 private:
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

enum class UlamMethod {
  /// Exact cell images when the map has an increasing lift, sampling otherwise.
  automatic,
  sampled,
  exact,
};

inline constexpr std::size_t kDefaultSamplesPerCell = 64;

/// Ulam discretization of the transfer operator of `map` on n_cells cells.
/// The sampled variant maps `samples_per_cell` equally spaced points of every
/// cell and bins the images; the exact variant inverts the monotone lift at the
/// cell boundaries of the image.
UlamMatrix ulam(const CircleMap& map, std::size_t n_cells,
                std::size_t samples_per_cell = kDefaultSamplesPerCell,
                UlamMethod method = UlamMethod::automatic, unsigned threads = 1);

/// Discrete pushforward: g_j = sum_i f_i P(i, j). Preserves total mass.
GridDensity push(const UlamMatrix& P, const GridDensity& f);

/// Ulam operators of the base maps of a family on a fixed grid, built on first
/// use and cached by `MapFamily::base_map_key`. Thread-safe.
class TransferSequence {
 public:
  TransferSequence(FamilyPtr family, std::size_t n_cells,
                   std::size_t samples_per_cell = kDefaultSamplesPerCell,
                   UlamMethod method = UlamMethod::automatic);

  const MapFamily& family() const noexcept { return *family_; }
  std::size_t n_cells() const noexcept { return n_cells_; }

  /// Ulam matrix of the base map T_index.
  std::shared_ptr<const UlamMatrix> matrix(std::size_t index) const;

 private:
  FamilyPtr family_;
  std::size_t n_cells_;
  std::size_t samples_per_cell_;
  UlamMethod method_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const UlamMatrix>> cache_;
};

/// L^(j,k) f = L_{T_k} o ... o L_{T_j} f for 1 <= j <= k.
GridDensity sequential_push(const TransferSequence& ops, std::size_t j, std::size_t k,
                            const GridDensity& f);

struct EquilibriumResult {
  GridDensity density;
  /// W distance between the last two iterates.
  double residual = 0.0;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kEquilibriumStepCap = 10000;

/// Iterates L^(k) from Lebesgue until the W distance between successive
/// iterates drops below `tol`. Throws ConvergenceError after `max_steps`.
EquilibriumResult equilibrium(const TransferSequence& ops, double tol,
                              std::size_t max_steps = kEquilibriumStepCap,
                              std::size_t w_nodes = kDefaultWNodes);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// First step and number of points used.
  std::size_t first_step = 0;
  std::size_t n_points = 0;

  /// Exponential rate -slope of log(value) against the step.
  double rate() const noexcept { return -slope; }
  /// Per-step contraction factor exp(slope).
  double ratio() const noexcept;
};

enum class CurveNorm { w, w11 };

struct ConvergenceCurve {
  CurveNorm norm = CurveNorm::w;
  std::vector<std::size_t> steps;
  std::vector<double> values;
  std::optional<RateFit> fit;
  /// First step whose value is at or below the resolution floor, if any.
  std::optional<std::size_t> floor_reached_at;
};

/// Values at or below kResolutionFloor times the largest value of a curve are
/// rounding noise and are left out of rate fits.
inline constexpr double kResolutionFloor = 1e-13;
inline constexpr std::size_t kMinTailPoints = 5;

/// Least-squares fit of log(value) against step over the last half of the
/// curve, using only resolvable values. Empty when fewer than kMinTailPoints
/// qualify.
std::optional<RateFit> fit_exponential_tail(std::span<const std::size_t> steps,
                                            std::span<const double> values);

/// ||L^(k) f0 - mu||_W for k = 0..n, where mu is the equilibrium of the
/// sequence (computed when not supplied).
ConvergenceCurve convergence_curve(const TransferSequence& ops, const GridDensity& f0,
                                   std::size_t n, const GridDensity* equilibrium_density = nullptr,
                                   std::size_t w_nodes = kDefaultWNodes);

/// w11_norm(L^(k) g) for k = 0..n; g must have zero mean. The W^{1,1} norm of
/// the circle grid stands in for the family-specific strong norm.
ConvergenceCurve loss_of_memory(const TransferSequence& ops, const GridDensity& g, std::size_t n);

}  // namespace loglaw
