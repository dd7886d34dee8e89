#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "loglaw/measures.hpp"

namespace loglaw::oracle {

/// Dense tableau simplex with Bland's rule for  max c.x  s.t.  A x <= b, x >= 0,
/// b >= 0. Small problems only.
double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                   const std::vector<double>& c);

/// The grid W problem of `cycle_dual_norm` written out as a plain LP, with
/// g = p - 1 so that p = 0 is feasible.
double cycle_dual_norm_lp(std::span<const double> node_mass);

/// Box-counting dimension of a cloud in S^1 x D^2 (or S^1): slope of
/// log N(eps) against log(1/eps) for eps = 2^-k_min .. 2^-k_max.
double box_counting_dimension(const EmpiricalMeasure& cloud, int k_min, int k_max);

/// Kolmogorov-Smirnov distance of the base coordinates to the uniform law.
double ks_uniform(const EmpiricalMeasure& cloud);

/// Exact pushforward by the doubling map of a piecewise-constant density on a
/// dyadic grid.
std::vector<double> doubling_push(std::span<const double> f);

}  // namespace loglaw::oracle
