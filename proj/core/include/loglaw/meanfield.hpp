#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "loglaw/measures.hpp"
#include "loglaw/systems.hpp"
#include "loglaw/transfer.hpp"

namespace loglaw {

/// Coupling kernel h(x, y): how a unit at y displaces a unit at x. Kernels
/// with a separable form h = sum_k u_k(x) v_k(y) let the mean field be reduced
/// to a few ensemble averages.
class Coupling {
 public:
  struct Term {
    double (*u)(double);
    double (*v)(double);
  };

  /// h(x, y) = sin(2 pi (y - x)) = sin(2 pi y) cos(2 pi x) - cos(2 pi y) sin(2 pi x).
  static Coupling sine();
  /// Arbitrary smooth kernel; sup|h| and sup|dh/dx| are estimated on a grid.
  static Coupling general(std::string name, std::function<double(double, double)> h);

  double operator()(double x, double y) const { return h_(x, y); }
  const std::string& name() const noexcept { return name_; }
  bool separable() const noexcept { return !terms_.empty(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  double sup_abs() const noexcept { return sup_abs_; }
  double sup_dx() const noexcept { return sup_dx_; }

 private:
  std::string name_;
  std::function<double(double, double)> h_;
  std::vector<Term> terms_;
  double sup_abs_ = 0.0;
  double sup_dx_ = 0.0;
};

struct DensityRepresentation {
  std::size_t n_cells = 4096;
};

struct ParticleRepresentation {
  std::size_t n_particles = 100000;
};

using Representation = std::variant<DensityRepresentation, ParticleRepresentation>;

/// Particle ensembles with a non-separable kernel cost O(N^2) per step.
inline constexpr std::size_t kGeneralKernelParticleCap = 20000;

/// The system (S^1, T, delta, h). Construction rejects couplings with
/// delta * sup|dh/dx| > 1/2, for which Phi is not safely a diffeomorphism.
class MeanFieldConfig {
 public:
  MeanFieldConfig(ExpandingCircleMap base, Coupling coupling, double delta,
                  Representation representation = DensityRepresentation{});

  const ExpandingCircleMap& base() const noexcept { return base_; }
  const Coupling& coupling() const noexcept { return coupling_; }
  double delta() const noexcept { return delta_; }
  const Representation& representation() const noexcept { return representation_; }
  /// 1 / (2 sup|dh/dx|).
  double delta_max() const noexcept;

 private:
  ExpandingCircleMap base_;
  Coupling coupling_;
  double delta_;
  Representation representation_;
};

/// Global state at time t: a density or a particle ensemble on the circle.
struct GlobalState {
  Measure measure;
  std::size_t time = 0;
};

/// delta * int h(x, y) dmu(y), by direct quadrature of the state.
double mean_displacement(double x, const GlobalState& state, const MeanFieldConfig& config);

/// Phi_{delta, mu}(x) = x + mean_displacement(x) mod 1.
CirclePoint phi(CirclePoint x, const GlobalState& state, const MeanFieldConfig& config);

/// The displacement x -> delta int h(x, y) dmu(y) of one state, precomputed
/// for repeated evaluation: ensemble moments for separable kernels, a nodal
/// table with periodic linear interpolation for densities otherwise, and the
/// O(N) sum for ensembles otherwise.
class DisplacementField {
 public:
  DisplacementField(const Measure& mu, const MeanFieldConfig& config);

  double operator()(double x) const;
  /// Upper bound of |displacement|.
  double bound() const noexcept { return bound_; }
  /// Largest difference from `other` over the nodes of a uniform grid.
  double sup_distance(const DisplacementField& other, std::size_t nodes = 4096) const;

 private:
  double delta_;
  const Coupling* coupling_;
  std::vector<double> moments_;
  std::vector<double> table_;
  std::shared_ptr<const EmpiricalMeasure> cloud_;
  double bound_ = 0.0;
};

/// Pushes `f` forward by the circle diffeomorphism x -> x + field(x). Cell
/// masses are integrals of f between preimages of the cell boundaries, so the
/// total mass is kept exactly.
GridDensity push_by_displacement(const GridDensity& f, const DisplacementField& field);

/// Self-consistent transfer operator of a configuration: the Ulam matrix of T
/// is built once and shared by every step.
class MeanFieldSystem {
 public:
  explicit MeanFieldSystem(MeanFieldConfig config);

  const MeanFieldConfig& config() const noexcept { return config_; }
  /// Ulam matrix of T on the configured density grid.
  const UlamMatrix& base_operator() const;
  std::size_t n_cells() const noexcept { return n_cells_; }

 private:
  MeanFieldConfig config_;
  std::size_t n_cells_;
  mutable std::once_flag built_;
  mutable std::unique_ptr<UlamMatrix> base_operator_;
};

/// mu_{t+1} = L_{Phi_{delta, mu_t} o T}(mu_t). Densities: Ulam push by T, then
/// push_by_displacement. Particles: x -> Phi(T(x)) with the mean field of the
/// ensemble before the step.
GlobalState sct_step(const GlobalState& state, const MeanFieldSystem& system);

struct FixedPointResult {
  GridDensity density;
  /// w11_norm of the difference of the last two iterates.
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> residuals;
};

inline constexpr std::size_t kFixedPointStepCap = 10000;

/// Iterates sct_step from Lebesgue until w11_norm(f_{k+1} - f_k) < tol.
FixedPointResult fixed_point(const MeanFieldSystem& system, double tol,
                             std::size_t max_iterations = kFixedPointStepCap);

/// The map sequence seen by a single unit, T_n = Phi_{delta, mu_{n-1}} o T for
/// n >= 1, where mu_n is the n-th image of the initial state under the
/// self-consistent operator. The state sequence is computed at construction
/// until two consecutive displacement fields agree to kSettleTolerance; later
/// indices reuse the last field. Throws ConvergenceError when that takes more
/// than kFixedPointStepCap states.
class InducedFamily final : public MapFamily {
 public:
  InducedFamily(std::shared_ptr<const MeanFieldSystem> system, GlobalState initial);

  PhaseSpace space() const noexcept override { return PhaseSpace::circle; }
  PhasePoint step(std::size_t index, const PhasePoint& p) const override;
  std::string descriptor() const override;
  std::optional<CircleMap> base_map(std::size_t index) const override;
  std::size_t base_map_key(std::size_t index) const override;

  static constexpr double kSettleTolerance = 1e-15;

  /// Displacement field of the state mu_t.
  const DisplacementField& field(std::size_t t) const;
  /// Index of the last distinct state.
  std::size_t settled_at() const noexcept { return fields_.size() - 1; }

 private:
  std::shared_ptr<const MeanFieldSystem> system_;
  std::vector<DisplacementField> fields_;
};

/// Builds the induced family of `initial` under `system`.
std::shared_ptr<const InducedFamily> induced_family(std::shared_ptr<const MeanFieldSystem> system,
                                                    GlobalState initial);

}  // namespace loglaw
