#pragma once

// Return-time tails and correlation decay of the suspension flow over the
// one-dimensional quotient map with roof r_neu.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlab/csv.hpp"
#include "nlab/poincare.hpp"

namespace nlab {

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct PowerLawFit {
  double exponent = 0.0;  ///< log-log slope
  double intercept = 0.0;
  double std_error = 0.0;    ///< standard error of the slope
  double residual_stderr = 0.0;
  std::size_t n_points = 0;
};

/// OLS on (ln x, ln y) over points with lo <= x <= hi. Throws FitFailure with fewer than
/// three points in the window, a nonpositive value there, or a degenerate regressor.
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys, const FitWindow& window);

/// `thresholds` log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

enum class UndersamplingPolicy { Warn, Throw };

struct TailOptions {
  std::size_t n_iterates = 10'000'000;
  std::size_t burn_in = 10'000;
  /// Independent orbit segments; fixed so the result does not depend on the worker count.
  std::size_t chunks = 64;
  std::vector<double> thresholds = log_space(10.0, 1e5, 41);
  FitWindow window{1e2, 1e4};
  std::size_t min_tail_count = 50;
  UndersamplingPolicy policy = UndersamplingPolicy::Warn;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  /// Replaces r_neu when set.
  ScalarFn roof;
};

struct TailEstimate {
  std::vector<double> thresholds;
  std::vector<double> survival;
  std::vector<std::size_t> counts;  ///< samples with r > threshold
  std::size_t n_samples = 0;
  /// Decay exponent, i.e. minus the log-log slope of the survival function.
  double fitted_exponent = 0.0;
  double std_error = 0.0;
  FitWindow fit_window;
  bool degenerate = false;
  std::size_t tail_count = 0;  ///< samples beyond the upper end of the fit window
  std::string warning;
};

/// Empirical survival function of the roof along orbits of f_neu.
/// Throws TailUndersampled (policy Throw, or too few points to fit), DomainEscape.
TailEstimate return_time_tail(const PoincareParams& p, const TailOptions& opts);

enum class ObservableKind {
  OddBump,   ///< sign(x) * bump(|x|) * sin^2(pi s / r(x)), zero mean by symmetry
  EvenBump,  ///< bump(|x|) * sin^2(pi s / r(x))
  Constant,
};

struct ObservableSpec {
  ObservableKind kind = ObservableKind::OddBump;
  double center = 0.5;
  double width = 0.3;
  double value = 1.0;  ///< Constant only

  /// v(x, s) on the suspension {0 <= s < r}.
  double operator()(double x, double s, double r) const;
  /// Short text label, e.g. "odd_bump(center=0.5,width=0.3)".
  std::string describe() const;
};

ObservableSpec observable_from_string(const std::string& name);

struct CorrelationOptions {
  std::vector<double> t_grid = {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0};
  std::size_t n_samples = 1'000'000;
  /// Spacing of the time-equispaced samples; lags are rounded to multiples of dt.
  double dt = 1.0;
  std::size_t burn_in = 10'000;
  std::size_t chunks = 32;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  ScalarFn roof;
};

struct CorrelationSeries {
  std::vector<double> times;
  std::vector<double> rho;
  /// Standard error from the spread over chunks.
  std::vector<double> std_error;
  std::string v_label;
  std::string w_label;
  std::size_t n_samples = 0;
};

/// rho_t = |E[v w(flow_t)] - E[v] E[w]| by Birkhoff averages along the suspension flow.
/// Throws SimulationFailure on non-finite averages.
CorrelationSeries correlation_decay(const PoincareParams& p, const ObservableSpec& v, const ObservableSpec& w,
                                    const CorrelationOptions& opts);

/// Running maximum from the right.
std::vector<double> upper_envelope(const std::vector<double>& ys);
/// Power-law fit of the upper envelope of rho over the window.
PowerLawFit envelope_slope(const std::vector<double>& times, const std::vector<double>& rho, const FitWindow& window);

/// `t,survival`.
void write_tail_csv(std::ostream& os, const TailEstimate& est, const Metadata& meta = {});
/// `t,rho`.
void write_correlation_csv(std::ostream& os, const CorrelationSeries& series, const Metadata& meta = {});

}  // namespace nlab
