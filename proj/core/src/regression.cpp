#include "nlab/regression.hpp"

#include <cmath>

#include "nlab/errors.hpp"

namespace nlab {

namespace {

void check_input(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_n) {
  if (x.size() != y.size()) throw FitFailure("regression inputs differ in length");
  if (x.size() < min_n) {
    throw FitFailure("regression needs at least " + std::to_string(min_n) + " points, got " +
                     std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw FitFailure("non-finite regression input");
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

}  // namespace

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  check_input(x, y, 2);
  const std::size_t n = x.size();
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (!(sxx > 0.0) || sxx <= 1e-300 * n) throw FitFailure("degenerate regressor: all abscissae equal");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ssr += r * r;
    }
    const double s2 = ssr / static_cast<double>(n - 2);
    fit.residual_stderr = std::sqrt(s2);
    fit.slope_stderr = std::sqrt(s2 / sxx);
  }
  return fit;
}

double fixed_slope_intercept(const std::vector<double>& x, const std::vector<double>& y, double slope) {
  check_input(x, y, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += y[i] - slope * x[i];
  return s / static_cast<double>(x.size());
}

}  // namespace nlab
