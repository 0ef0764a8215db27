#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nlab/errors.hpp"
#include "nlab/exponents.hpp"
#include "nlab/regression.hpp"
#include "oracles.hpp"

using namespace nlab;

namespace {

std::vector<double> grid() { return make_grid(1e-5, 1e-4, 25); }

std::vector<double> power(const std::vector<double>& x, double c, double e) {
  std::vector<double> y;
  for (double v : x) y.push_back(c * std::pow(v, e));
  return y;
}

}  // namespace

TEST(Exponents, RawEstimateOfExactPowerLaw) {
  const auto x = grid();
  for (double r : estimate_beta_raw(x, power(x, 1.0, 0.4))) EXPECT_NEAR(r, 0.4, 1e-14);
  const auto two = estimate_beta_raw({1e-4}, {2 * std::pow(1e-4, 0.4)});
  EXPECT_NEAR(two[0], 0.4 + std::log(2.0) / std::log(1e-4), 1e-14);
  EXPECT_NEAR(two[0], 0.3247, 1e-4);
}

TEST(Exponents, InvalidPointsAreFlagged) {
  const auto raw = estimate_beta_raw({1e-4, 1e-3, 2.0, 1e-2}, {0.1, -0.1, 0.5, 0.0});
  EXPECT_FALSE(std::isnan(raw[0]));
  EXPECT_TRUE(std::isnan(raw[1]));
  EXPECT_TRUE(std::isnan(raw[2]));
  EXPECT_TRUE(std::isnan(raw[3]));

  auto x = grid();
  auto w = power(x, 1.1, 0.4);
  w[3] = -1.0;
  const auto fit = fit_adjustment(x, w, 0.4);
  EXPECT_EQ(fit.n_valid, x.size() - 1);
  EXPECT_TRUE(std::isnan(fit.adjusted[3]));
  EXPECT_EQ(fit.adjusted.size(), x.size());
  EXPECT_NEAR(fit.c_fit, 1.1, 1e-12);
}

TEST(Exponents, AdjustmentRecoversSyntheticConstants) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uc(0.2, 5.0), ub(0.05, 0.95);
  const auto x = grid();
  for (int trial = 0; trial < 20; ++trial) {
    const double c = uc(rng), b = ub(rng);
    const auto w = power(x, c, b);
    for (auto method : {AdjustmentMethod::FixedExponent, AdjustmentMethod::FreeIntercept}) {
      const auto fit = fit_adjustment(x, w, b, method);
      EXPECT_NEAR(fit.c_fit / c, 1.0, 1e-12);
      EXPECT_NEAR(fit.slope_fit / b, 1.0, 1e-12);
      for (double a : fit.adjusted) EXPECT_NEAR(a, b, 1e-12);
    }
  }
}

TEST(Exponents, ScalingOmegaScalesConstantOnly) {
  const auto x = grid();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<double> w = power(x, 1.1, 0.4);
  for (double& v : w) v *= std::exp(noise(rng));
  std::vector<double> w3 = w;
  for (double& v : w3) v *= 3.0;
  const auto a = fit_adjustment(x, w, 0.4);
  const auto b = fit_adjustment(x, w3, 0.4);
  EXPECT_NEAR(b.c_fit / a.c_fit, 3.0, 1e-12);
  EXPECT_NEAR(b.slope_fit, a.slope_fit, 1e-12);
  EXPECT_NEAR(a.slope_fit, 0.4, 0.05);
}

TEST(Exponents, FreeSlopeMatchesNaiveRegression) {
  const auto x = grid();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 1e-2);
  std::vector<double> lx, lw, w;
  for (double v : x) {
    const double o = 0.8 * std::pow(v, 0.27) * std::exp(noise(rng));
    w.push_back(o);
    lx.push_back(std::log(v));
    lw.push_back(std::log(o));
  }
  const auto fit = fit_adjustment(x, w, 0.27);
  EXPECT_NEAR(fit.slope_fit, oracle::naive_slope(lx.data(), lw.data(), lx.size()), 1e-10);
  EXPECT_NEAR(ols(lx, lw).slope, fit.slope_fit, 1e-14);
}

TEST(Exponents, DegenerateInputFails) {
  EXPECT_THROW(fit_adjustment({1e-4, 1e-4, 1e-4}, {0.1, 0.2, 0.3}, 0.4), FitFailure);
  EXPECT_THROW(fit_adjustment({1e-4}, {0.1}, 0.4), FitFailure);
  EXPECT_THROW(fit_adjustment({1e-4, 1e-3}, {-1.0, 0.1}, 0.4), FitFailure);
  EXPECT_THROW(ols({1, 2}, {1, std::nan("")}), FitFailure);
}

TEST(Exponents, Beta2FromExactTimes) {
  const auto x = grid();
  const auto fit = estimate_beta2(x, power(x, 1.0, -0.75), 4.0 / 3.0);
  for (double r : fit.raw) EXPECT_NEAR(r, 4.0 / 3.0, 1e-13);
  for (double a : fit.adjusted) EXPECT_NEAR(a, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(fit.slope_fit, 4.0 / 3.0, 1e-12);

  for (auto method : {AdjustmentMethod::FixedExponent, AdjustmentMethod::FreeIntercept}) {
    const auto scaled = estimate_beta2(x, power(x, 0.133, -0.5), 2.0, method);
    EXPECT_NEAR(scaled.c_fit, 0.133, 1e-12);
    EXPECT_NEAR(scaled.slope_fit, 2.0, 1e-11);
    for (double a : scaled.adjusted) EXPECT_NEAR(a, 2.0, 1e-11);
  }
}

TEST(Exponents, Beta2ExcludesShortTimes) {
  const auto fit = estimate_beta2({1e-1, 1e-2, 1e-3, 1e-4}, {0.5, 10.0, 100.0, 1000.0}, 2.0);
  EXPECT_TRUE(std::isnan(fit.raw[0]));
  EXPECT_TRUE(std::isnan(fit.adjusted[0]));
  EXPECT_EQ(fit.n_valid, 3u);
  EXPECT_NEAR(fit.slope_fit, 1.0, 1e-12);
  EXPECT_THROW(estimate_beta2({1e-1, 1e-2}, {0.5, 1.0}, 2.0), FitFailure);
}

TEST(Exponents, AdjustedNeverWorseThanRawOnSweep) {
  Coefficients c;
  c.a0 = 15;
  c.a2 = 5;
  c.b0 = 1;
  c.b2 = 3;
  const NeutralParams p(Model::TwoD, c);
  const auto samples = sweep(p, make_grid(1e-5, 1e-4, 40));
  const auto e = derived_exponents(p);
  const auto fb = fit_adjustment(samples, e.beta);
  EXPECT_LE(fb.max_abs_err_adjusted, fb.max_abs_err_raw);
  EXPECT_LT(fb.err_at_smallest_x, fb.err_at_largest_x);
  EXPECT_NEAR(fb.slope_fit, 0.4, 1e-3);
  const auto f2 = estimate_beta2(samples, e.beta2);
  EXPECT_LE(f2.max_abs_err_adjusted, f2.max_abs_err_raw);
  EXPECT_LT(f2.err_at_smallest_x, f2.err_at_largest_x);
}

TEST(Exponents, ReportsAreWritten) {
  const auto x = grid();
  const auto fit = fit_adjustment(x, power(x, 1.1, 0.4), 0.4);
  std::ostringstream csv, summary;
  write_fit_csv(csv, fit, {{"command", "beta-fit"}});
  EXPECT_NE(csv.str().find("# command: beta-fit\nx0,raw,adjusted,theoretical\n"), std::string::npos);
  write_fit_summary(summary, fit);
  EXPECT_NE(summary.str().find("kind: beta"), std::string::npos);
  EXPECT_NE(summary.str().find("c_fit: "), std::string::npos);
  const PlotSpec plot = fit_plot(fit, "beta");
  ASSERT_EQ(plot.series.size(), 3u);
  EXPECT_EQ(plot.series[0].color, "#d62728");
  EXPECT_EQ(plot.series[1].color, "#2ca02c");
  EXPECT_EQ(plot.series[2].color, "#1f77b4");
}
