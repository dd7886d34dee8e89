#include "loglaw/regression.hpp"

#include <algorithm>
#include <cmath>

#include "loglaw/errors.hpp"

namespace loglaw {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("fit_line: length mismatch");
  if (x.size() < 2) throw InvalidInput("fit_line: need at least two points");
  double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (fit.slope * x[i] + fit.intercept);
    residual += e * e;
  }
  if (syy > 0.0) {
    fit.r_squared = std::clamp(1.0 - residual / syy, 0.0, 1.0);
  } else {
    fit.r_squared = residual <= 1e-24 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace loglaw
