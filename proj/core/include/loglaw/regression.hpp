#pragma once

#include <span>

namespace loglaw {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Coefficient of determination; 1 when the ordinates have no spread and the
  /// line reproduces them.
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct abscissae.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace loglaw
