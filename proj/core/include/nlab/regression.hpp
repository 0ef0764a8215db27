#pragma once

#include <cstddef>
#include <vector>

namespace nlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  /// sqrt(SSR / (n - 2)); 0 when n == 2.
  double residual_stderr = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = slope * x + intercept.
/// Throws FitFailure for fewer than two points, non-finite input or a constant regressor.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares intercept with the slope held fixed: mean(y - slope * x).
double fixed_slope_intercept(const std::vector<double>& x, const std::vector<double>& y, double slope);

}  // namespace nlab
