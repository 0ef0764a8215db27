#include "nlab/exponents.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nlab/errors.hpp"
#include "nlab/regression.hpp"

namespace nlab {

std::string_view to_string(ExponentKind k) { return k == ExponentKind::Beta ? "beta" : "beta2"; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool valid_x(double x) { return std::abs(x) > 0.0 && std::abs(x) < 1.0; }

void split_samples(const std::vector<DulacSample>& samples, bool want_tau, std::vector<double>& x0,
                   std::vector<double>& v) {
  x0.clear();
  v.clear();
  for (const auto& s : samples) {
    x0.push_back(s.x0);
    v.push_back(s.ok() ? (want_tau ? s.tau : s.omega) : kNaN);
  }
}

void finish(ExponentFit& fit) {
  fit.max_abs_err_raw = 0.0;
  fit.max_abs_err_adjusted = 0.0;
  double x_small = std::numeric_limits<double>::infinity(), x_large = 0.0;
  for (std::size_t i = 0; i < fit.x0.size(); ++i) {
    if (std::isnan(fit.adjusted[i])) continue;
    const double e_adj = std::abs(fit.adjusted[i] - fit.theoretical);
    fit.max_abs_err_raw = std::max(fit.max_abs_err_raw, std::abs(fit.raw[i] - fit.theoretical));
    fit.max_abs_err_adjusted = std::max(fit.max_abs_err_adjusted, e_adj);
    const double ax = std::abs(fit.x0[i]);
    if (ax < x_small) {
      x_small = ax;
      fit.err_at_smallest_x = e_adj;
    }
    if (ax > x_large) {
      x_large = ax;
      fit.err_at_largest_x = e_adj;
    }
  }
}

}  // namespace

std::vector<double> estimate_beta_raw(const std::vector<double>& x0, const std::vector<double>& omega) {
  if (x0.size() != omega.size()) throw ContractViolation("x0 and omega differ in length");
  std::vector<double> out(x0.size(), kNaN);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (valid_x(x0[i]) && omega[i] > 0.0 && std::isfinite(omega[i])) {
      out[i] = std::log(omega[i]) / std::log(std::abs(x0[i]));
    }
  }
  return out;
}

std::vector<double> estimate_beta_raw(const std::vector<DulacSample>& samples) {
  std::vector<double> x0, omega;
  split_samples(samples, false, x0, omega);
  return estimate_beta_raw(x0, omega);
}

ExponentFit fit_adjustment(const std::vector<double>& x0, const std::vector<double>& omega, double theoretical_beta,
                           AdjustmentMethod method) {
  ExponentFit fit;
  fit.kind = ExponentKind::Beta;
  fit.method = method;
  fit.theoretical = theoretical_beta;
  fit.x0 = x0;
  fit.raw = estimate_beta_raw(x0, omega);

  std::vector<double> lx, lw;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (std::isnan(fit.raw[i])) continue;
    lx.push_back(std::log(std::abs(x0[i])));
    lw.push_back(std::log(omega[i]));
  }
  fit.n_valid = lx.size();
  if (lx.size() < 2) throw FitFailure("beta fit needs at least two valid points, got " + std::to_string(lx.size()));
  const LinearFit reg = ols(lx, lw);
  fit.slope_fit = reg.slope;
  fit.slope_stderr = reg.slope_stderr;
  fit.residual_stderr = reg.residual_stderr;
  fit.ln_c_fit = method == AdjustmentMethod::FixedExponent ? fixed_slope_intercept(lx, lw, theoretical_beta)
                                                           : reg.intercept;
  fit.c_fit = std::exp(fit.ln_c_fit);
  fit.adjustment_log = fit.ln_c_fit;

  fit.adjusted.assign(x0.size(), kNaN);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (std::isnan(fit.raw[i])) continue;
    fit.adjusted[i] = (std::log(omega[i]) - fit.ln_c_fit) / std::log(std::abs(x0[i]));
  }
  finish(fit);
  return fit;
}

ExponentFit fit_adjustment(const std::vector<DulacSample>& samples, double theoretical_beta, AdjustmentMethod method) {
  std::vector<double> x0, omega;
  split_samples(samples, false, x0, omega);
  return fit_adjustment(x0, omega, theoretical_beta, method);
}

ExponentFit estimate_beta2(const std::vector<double>& x0, const std::vector<double>& tau, double theoretical_beta2,
                           AdjustmentMethod method) {
  if (x0.size() != tau.size()) throw ContractViolation("x0 and tau differ in length");
  ExponentFit fit;
  fit.kind = ExponentKind::Beta2;
  fit.method = method;
  fit.theoretical = theoretical_beta2;
  fit.x0 = x0;
  fit.raw.assign(x0.size(), kNaN);

  std::vector<double> lx, lt;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!valid_x(x0[i]) || !(tau[i] > 1.0) || !std::isfinite(tau[i])) continue;
    const double l_x = std::log(std::abs(x0[i])), l_t = std::log(tau[i]);
    fit.raw[i] = -l_x / l_t;
    lx.push_back(l_x);
    lt.push_back(l_t);
  }
  fit.n_valid = lx.size();
  if (lx.size() < 2) throw FitFailure("beta2 fit needs at least two valid points, got " + std::to_string(lx.size()));
  const LinearFit reg = ols(lx, lt);
  if (!(reg.slope < 0.0)) throw FitFailure("flow time does not grow as x0 decreases");
  fit.slope_fit = -1.0 / reg.slope;
  fit.slope_stderr = reg.slope_stderr / (reg.slope * reg.slope);
  fit.residual_stderr = reg.residual_stderr;
  if (method == AdjustmentMethod::FixedExponent) {
    fit.ln_c_fit = fixed_slope_intercept(lx, lt, -1.0 / theoretical_beta2);
    fit.adjustment_log = theoretical_beta2 * fit.ln_c_fit;
  } else {
    fit.ln_c_fit = reg.intercept;
    fit.adjustment_log = fit.slope_fit * fit.ln_c_fit;
  }
  fit.c_fit = std::exp(fit.ln_c_fit);

  fit.adjusted.assign(x0.size(), kNaN);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (std::isnan(fit.raw[i])) continue;
    fit.adjusted[i] = (fit.adjustment_log - std::log(std::abs(x0[i]))) / std::log(tau[i]);
  }
  finish(fit);
  return fit;
}

ExponentFit estimate_beta2(const std::vector<DulacSample>& samples, double theoretical_beta2, AdjustmentMethod method) {
  std::vector<double> x0, tau;
  split_samples(samples, true, x0, tau);
  return estimate_beta2(x0, tau, theoretical_beta2, method);
}

void write_fit_csv(std::ostream& os, const ExponentFit& fit, const Metadata& meta) {
  write_metadata(os, meta);
  os << "x0,raw,adjusted,theoretical\n";
  for (std::size_t i = 0; i < fit.x0.size(); ++i) {
    os << format_double(fit.x0[i]) << ',' << format_double(fit.raw[i]) << ',' << format_double(fit.adjusted[i])
       << ',' << format_double(fit.theoretical) << '\n';
  }
}

void write_fit_summary(std::ostream& os, const ExponentFit& fit) {
  os << "kind: " << to_string(fit.kind) << '\n';
  os << "method: " << (fit.method == AdjustmentMethod::FixedExponent ? "fixed_exponent" : "free_intercept") << '\n';
  os << "n_valid: " << fit.n_valid << '\n';
  os << "c_fit: " << format_double(fit.c_fit) << '\n';
  os << "ln_c_fit: " << format_double(fit.ln_c_fit) << '\n';
  os << "adjustment_log: " << format_double(fit.adjustment_log) << '\n';
  os << "slope_fit: " << format_double(fit.slope_fit) << '\n';
  os << "slope_stderr: " << format_double(fit.slope_stderr) << '\n';
  os << "residual_stderr: " << format_double(fit.residual_stderr) << '\n';
  os << "theoretical: " << format_double(fit.theoretical) << '\n';
  os << "max_abs_err_raw: " << format_double(fit.max_abs_err_raw) << '\n';
  os << "max_abs_err_adjusted: " << format_double(fit.max_abs_err_adjusted) << '\n';
  os << "err_at_smallest_x: " << format_double(fit.err_at_smallest_x) << '\n';
  os << "err_at_largest_x: " << format_double(fit.err_at_largest_x) << '\n';
}

PlotSpec fit_plot(const ExponentFit& fit, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "x";
  spec.y_label = fit.kind == ExponentKind::Beta ? "beta" : "beta2";
  spec.log_x = true;
  std::vector<double> theo(fit.x0.size(), fit.theoretical);
  spec.series.push_back({"raw", "#d62728", fit.x0, fit.raw, false});
  spec.series.push_back({"adjusted", "#2ca02c", fit.x0, fit.adjusted, false});
  spec.series.push_back({"theoretical", "#1f77b4", fit.x0, theo, false});
  return spec;
}

}  // namespace nlab
