#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nlab/dulac.hpp"
#include "nlab/errors.hpp"
#include "nlab/regression.hpp"
#include "oracles.hpp"

using namespace nlab;

namespace {

Coefficients coeffs(double a2 = 5, double b2 = 3) {
  Coefficients c;
  c.a0 = 15;
  c.a2 = a2;
  c.b0 = 1;
  c.b2 = b2;
  c.a1 = c.b1 = 1;
  c.c0 = c.c2 = 1;
  c.ell = 10;
  return c;
}

}  // namespace

TEST(Dulac, PlanarTransitMatchesOracle) {
  const NeutralParams p(Model::TwoD, coeffs());
  const DulacSample s = dulac_map(p, 1e-4);
  ASSERT_TRUE(s.ok());
  const auto ref = oracle::planar_transit(15, 5, 1, 3, 1e-4, 1.0, 1e-6);
  EXPECT_NEAR(s.tau / ref.tau, 1.0, 5e-7);
  EXPECT_NEAR(s.omega / ref.omega, 1.0, 5e-7);
  EXPECT_LE(s.exit.residual, 1e-12);
}

TEST(Dulac, StartOnSectionIsImmediate) {
  const NeutralParams p(Model::Model3, coeffs());
  const DulacSample s = dulac_map(p, 1.0, LeafAnchors{0.3, 0.7});
  EXPECT_EQ(s.tau, 0.0);
  EXPECT_EQ(s.omega, 0.7);
  const DulacSample planar = dulac_map(NeutralParams(Model::TwoD, coeffs()), -1.0, LeafAnchors{0.3, 0.7});
  EXPECT_EQ(planar.omega, 0.3);
}

TEST(Dulac, RejectsOutOfRangeStarts) {
  const NeutralParams p(Model::TwoD, coeffs());
  EXPECT_THROW(dulac_map(p, 0.0), ContractViolation);
  EXPECT_THROW(dulac_map(p, 1.5), ContractViolation);
  EXPECT_THROW(sweep(p, {1e-3, 0.0}), ContractViolation);
  EXPECT_THROW(sweep(p, {}), ContractViolation);
}

TEST(Dulac, PredictionIsDirectPower) {
  const NeutralParams p(Model::TwoD, coeffs());
  const auto pr = predict(p, 1e-4, {1.0, 1.0});
  EXPECT_NEAR(pr.omega_pred, std::pow(1e-4, 0.4), 1e-15);
  EXPECT_NEAR(pr.omega_pred, 0.02512, 1e-5);
  EXPECT_NEAR(pr.tau_pred, 1000.0, 1e-9);
  EXPECT_THROW(predict(p, 1e-4, {0.0, 1.0}), ContractViolation);
}

TEST(Dulac, GridRunsFromLargestToSmallest) {
  const auto g = make_grid(1e-5, 1e-4, 250);
  ASSERT_EQ(g.size(), 250u);
  EXPECT_EQ(g.front(), 1e-4);
  EXPECT_EQ(g.back(), 1e-5);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i], g[i - 1]);
  const double r = std::log(g[0] / g[1]);
  EXPECT_NEAR(std::log(g[100] / g[101]), r, 1e-12);

  const auto lin = make_grid(1e-5, 1e-4, 10, Spacing::Linear);
  EXPECT_NEAR(lin[0] - lin[1], lin[8] - lin[9], 1e-18);
  EXPECT_EQ(make_grid(1e-5, 1e-4, 1), std::vector<double>{1e-4});
  EXPECT_THROW(make_grid(0.0, 1e-4, 10), ContractViolation);
  EXPECT_THROW(make_grid(1e-5, 2.0, 10), ContractViolation);
  EXPECT_THROW(make_grid(1e-5, 1e-4, 0), ContractViolation);
}

TEST(Dulac, SweepIsIndependentOfWorkerCount) {
  const NeutralParams p(Model::Model3, coeffs());
  const auto g = make_grid(1e-4, 1e-2, 12);
  const auto one = sweep(p, g, {}, {}, 1);
  const auto three = sweep(p, g, {}, {}, 3);
  ASSERT_EQ(one.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(one[i].x0, g[i]);
    EXPECT_EQ(one[i].omega, three[i].omega);
    EXPECT_EQ(one[i].tau, three[i].tau);
    EXPECT_EQ(one[i].q, three[i].q);
  }
}

TEST(Dulac, SinglePointSweep) {
  const NeutralParams p(Model::TwoD, coeffs());
  const auto out = sweep(p, make_grid(1e-5, 1e-4, 1));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].ok());
}

TEST(Dulac, FailuresAreRecordedPerPoint) {
  const NeutralParams p(Model::TwoD, coeffs());
  DulacOptions opts;
  opts.zeta_hat.reset();
  opts.integrator.max_time = 50.0;
  // tau is about 4 at x0 = 0.1 and several hundred at 1e-5
  const auto out = sweep(p, {1e-1, 1e-5}, {}, opts, 1);
  EXPECT_TRUE(out[0].ok());
  EXPECT_EQ(out[1].status, SampleStatus::NoCrossing);
  EXPECT_TRUE(std::isnan(out[1].omega));
  EXPECT_NE(out[1].message.find("x0 ="), std::string::npos);
  EXPECT_THROW(sweep(p, {1e-5, 2e-5}, {}, opts, 1), SweepFailure);
}

TEST(Dulac, SweepCsvRoundTrip) {
  const NeutralParams p(Model::Model1, coeffs());
  auto samples = sweep(p, make_grid(1e-3, 1e-2, 4));
  samples[2].status = SampleStatus::BudgetExceeded;
  const Metadata meta{{"command", "dulac-sweep"}};
  std::stringstream ss;
  write_sweep_csv(ss, samples, meta);
  Metadata back_meta;
  const auto back = read_sweep_csv(ss, &back_meta);
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].x0, samples[i].x0);
    EXPECT_EQ(back[i].omega, samples[i].omega);
    EXPECT_EQ(back[i].tau, samples[i].tau);
    EXPECT_EQ(back[i].status, samples[i].status);
  }
  EXPECT_EQ(back_meta, meta);

  std::stringstream bad("x0,omega\n1,2\n");
  EXPECT_THROW(read_sweep_csv(bad), ConfigError);
}

TEST(Dulac, NegativeStartMirrors) {
  for (Model m : {Model::TwoD, Model::Model3}) {
    const NeutralParams p(m, coeffs());
    const DulacSample a = dulac_map(p, 3e-3);
    const DulacSample b = dulac_map(p, -3e-3);
    EXPECT_NEAR(b.exit.s_hit[0], -1.0, 1e-12);
    EXPECT_NEAR(std::abs(b.omega) / std::abs(a.omega), 1.0, 1e-9);
    EXPECT_NEAR(b.tau / a.tau, 1.0, 1e-9);
  }
}

TEST(Dulac, TimeGrowsAndExitShrinksTowardTheSaddle) {
  const NeutralParams p(Model::Model2, coeffs());
  const auto out = sweep(p, make_grid(1e-5, 1e-1, 20));
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_GT(out[i].tau, out[i - 1].tau);
    EXPECT_LT(out[i].omega, out[i - 1].omega);
    EXPECT_GT(out[i].q, 0.0);
  }
}

TEST(Dulac, Model1WithZeroYReducesToPlanar) {
  const NeutralParams m1(Model::Model1, coeffs());
  const NeutralParams p2(Model::TwoD, coeffs());
  const double rel = IntegratorConfig{}.rel_tol;
  for (double x0 : {1e-4, 1e-3, 1e-2}) {
    const DulacSample a = dulac_map(m1, x0, LeafAnchors{0.0, 1.0});
    const DulacSample b = dulac_map(p2, x0, LeafAnchors{1.0, 0.0});
    EXPECT_NEAR(a.omega / b.omega, 1.0, 100 * rel);
    EXPECT_NEAR(a.tau / b.tau, 1.0, 100 * rel);
    EXPECT_EQ(a.exit.s_hit[1], 0.0);
  }
}

TEST(Dulac, CorrectionToLeadingPowerLawDecays) {
  // omega / x^beta = c (1 + O(x^gamma)); successive differences on a geometric grid scale like x^gamma
  const NeutralParams p(Model::TwoD, coeffs());
  const double beta = derived_exponents(p).beta;
  const auto g = make_grid(1e-7, 1e-3, 9);
  const auto out = sweep(p, g);
  std::vector<double> lx, ld;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    const double r0 = out[i].omega / std::pow(g[i], beta);
    const double r1 = out[i + 1].omega / std::pow(g[i + 1], beta);
    lx.push_back(std::log(g[i]));
    ld.push_back(std::log(std::abs(r0 - r1)));
  }
  const double gamma = oracle::naive_slope(lx.data(), ld.data(), lx.size());
  EXPECT_GE(gamma, 1.0 / (2 * derived_exponents(p).beta2));
}
