#pragma once

// Raw and adjusted estimators of beta and beta2 from Dulac sweeps.

#include <iosfwd>
#include <string_view>
#include <vector>

#include "nlab/csv.hpp"
#include "nlab/dulac.hpp"
#include "nlab/svg.hpp"

namespace nlab {

enum class ExponentKind { Beta, Beta2 };

std::string_view to_string(ExponentKind k);

/// How the adjustment constant is obtained.
enum class AdjustmentMethod {
  /// Least squares for the constant alone, exponent held at the theoretical value.
  FixedExponent,
  /// Intercept of the free-slope regression.
  FreeIntercept,
};

struct ExponentFit {
  ExponentKind kind = ExponentKind::Beta;
  std::vector<double> x0;
  /// NaN where the input point was invalid (excluded from every fit).
  std::vector<double> raw;
  std::vector<double> adjusted;
  /// Multiplicative constant: omega ~ c_fit |x0|^beta, or tau ~ c_fit |x0|^(-1/beta2).
  double c_fit = 0.0;
  double ln_c_fit = 0.0;
  /// Constant entering the adjusted estimator: ln c_fit for beta, beta2 * ln c_fit for beta2.
  double adjustment_log = 0.0;
  /// Exponent from the free log-log regression.
  double slope_fit = 0.0;
  double slope_stderr = 0.0;
  double residual_stderr = 0.0;
  double theoretical = 0.0;
  double max_abs_err_raw = 0.0;
  double max_abs_err_adjusted = 0.0;
  /// |adjusted - theoretical| at the valid points with the smallest and largest |x0|.
  double err_at_smallest_x = 0.0;
  double err_at_largest_x = 0.0;
  std::size_t n_valid = 0;
  AdjustmentMethod method = AdjustmentMethod::FixedExponent;
};

/// Per point ln(omega) / ln|x0|; NaN for omega <= 0 or |x0| outside (0, 1).
std::vector<double> estimate_beta_raw(const std::vector<double>& x0, const std::vector<double>& omega);
std::vector<double> estimate_beta_raw(const std::vector<DulacSample>& samples);

/// Fits omega ~ c |x0|^beta and returns the adjusted estimates (ln omega - ln c) / ln|x0|.
/// Throws FitFailure with fewer than two valid points or a degenerate regressor.
ExponentFit fit_adjustment(const std::vector<double>& x0, const std::vector<double>& omega,
                           double theoretical_beta, AdjustmentMethod method = AdjustmentMethod::FixedExponent);
ExponentFit fit_adjustment(const std::vector<DulacSample>& samples, double theoretical_beta,
                           AdjustmentMethod method = AdjustmentMethod::FixedExponent);

/// Raw -ln|x0| / ln tau and adjusted (beta2 ln C - ln|x0|) / ln tau from tau ~ C |x0|^(-1/beta2).
/// Points with tau <= 1 are flagged and excluded.
ExponentFit estimate_beta2(const std::vector<double>& x0, const std::vector<double>& tau,
                           double theoretical_beta2, AdjustmentMethod method = AdjustmentMethod::FixedExponent);
ExponentFit estimate_beta2(const std::vector<DulacSample>& samples, double theoretical_beta2,
                           AdjustmentMethod method = AdjustmentMethod::FixedExponent);

/// `x0,raw,adjusted,theoretical`.
void write_fit_csv(std::ostream& os, const ExponentFit& fit, const Metadata& meta = {});
/// `key: value` lines: kind, c_fit, ln_c_fit, slope_fit, theoretical, max_abs_err_adjusted, ...
void write_fit_summary(std::ostream& os, const ExponentFit& fit);
/// Raw (red), adjusted (green) and theoretical (blue) against x0 on a log axis.
PlotSpec fit_plot(const ExponentFit& fit, const std::string& title);

}  // namespace nlab
