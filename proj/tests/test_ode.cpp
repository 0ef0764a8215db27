#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nlab/errors.hpp"
#include "nlab/fields.hpp"
#include "nlab/ode.hpp"

using namespace nlab;

namespace {

OdeSystem oscillator() {
  OdeSystem sys;
  sys.dim = 2;
  sys.rhs = [](const Vec& s, Vec& ds) {
    ds[0] = s[1];
    ds[1] = -s[0];
  };
  sys.jacobian = [](const Vec&, Mat& j) {
    j.setZero();
    j(0, 1) = 1;
    j(1, 0) = -1;
  };
  return sys;
}

OdeSystem blowup() {
  OdeSystem sys;
  sys.dim = 1;
  sys.rhs = [](const Vec& s, Vec& ds) { ds[0] = s[0] * s[0]; };
  sys.jacobian = [](const Vec& s, Mat& j) { j(0, 0) = 2 * s[0]; };
  return sys;
}

NeutralParams planar() {
  Coefficients c;
  c.a0 = 15;
  c.a2 = 5;
  c.b0 = 1;
  c.b2 = 3;
  return NeutralParams(Model::TwoD, c);
}

SectionSpec exit_right() {
  SectionSpec sec;
  sec.g = [](const Vec& s) { return s[0] - 1.0; };
  sec.direction = CrossingDirection::Increasing;
  return sec;
}

}  // namespace

TEST(Ode, LinearFieldReachesDoubling) {
  const auto sys = linear_system(LinearLorenzParams(1.0, 0.5, 2.0));
  IntegratorConfig cfg;
  const Trajectory tr = integrate(sys, make_state(0.5, 0.0, 0.0), std::log(2.0), cfg);
  EXPECT_EQ(tr.t_back(), std::log(2.0));
  EXPECT_NEAR(tr.back()[0], 1.0, 10 * cfg.rel_tol);
  EXPECT_EQ(tr.stop_reason, StopReason::ReachedEnd);
}

TEST(Ode, ZeroHorizonReturnsInitialState) {
  const auto sys = neutral_system(planar());
  const Vec s0 = make_state(0.2, 0.7);
  const Trajectory tr = integrate(sys, s0, 0.0);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.t_front(), 0.0);
  EXPECT_EQ(tr.back(), s0);

  const Trajectory orc = integrate_oracle(sys, s0, 0.0, 0.1);
  ASSERT_EQ(orc.size(), 1u);
  EXPECT_EQ(orc.back(), s0);
  EXPECT_THROW(integrate(sys, s0, -1.0), ContractViolation);
}

TEST(Ode, LinearExitTimeIsAnalytic) {
  const auto sys = linear_system(LinearLorenzParams(1.0, 0.5, 2.0));
  IntegratorConfig cfg;
  const auto res = integrate_to_section(sys, make_state(1e-4, 0.0, 1.0), exit_right(), cfg);
  EXPECT_NEAR(res.hit.t_hit, -std::log(1e-4), 1e-9);
  EXPECT_LE(res.hit.residual, cfg.event_tol);
  EXPECT_EQ(res.trajectory.stop_reason, StopReason::SectionHit);
}

TEST(Ode, RadauAgreesWithFixedStepOracle) {
  const auto sys = neutral_system(planar());
  IntegratorConfig cfg;
  const Vec s0 = make_state(0.05, 0.8);
  const double t_end = integrate_to_section(sys, s0, exit_right(), cfg).hit.t_hit;
  const Trajectory tr = integrate(sys, s0, t_end, cfg);
  const Trajectory orc = integrate_oracle(sys, s0, t_end, 1e-4);
  EXPECT_LT((tr.back() - orc.back()).norm(), 100 * cfg.rel_tol);
  for (double f : {0.1, 0.4, 0.8, 0.97}) {
    const Trajectory part = integrate_oracle(sys, s0, f * t_end, 1e-4);
    EXPECT_LT((tr.at(f * t_end) - part.back()).norm(), 1e-6) << "t = " << f * t_end;
  }
}

TEST(Ode, OracleConvergesAtFourthOrder) {
  const auto sys = linear_system(LinearLorenzParams(1.0, 0.5, 2.0));
  const Vec s0 = make_state(0.5, 1.0, 1.0);
  const double exact = 0.5 * std::exp(2.0);
  const double e1 = std::abs(integrate_oracle(sys, s0, 2.0, 0.1).back()[0] - exact);
  const double e2 = std::abs(integrate_oracle(sys, s0, 2.0, 0.05).back()[0] - exact);
  EXPECT_NEAR(e1 / e2, 16.0, 1.5);
  EXPECT_THROW(integrate_oracle(sys, s0, 1.0, 0.0), ContractViolation);
}

TEST(Ode, OracleReportsOverflow) {
  Vec s0(1);
  s0[0] = 1.0;
  EXPECT_THROW(integrate_oracle(blowup(), s0, 3.0, 0.01), NumericalOverflow);
}

TEST(Ode, DenseOutputMatchesStepEndpoints) {
  const auto sys = neutral_system(planar());
  const double t_end = integrate_to_section(sys, make_state(0.01, 1.0), exit_right()).hit.t_hit;
  const Trajectory tr = integrate(sys, make_state(0.01, 1.0), t_end);
  ASSERT_GT(tr.steps(), 5u);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < tr.steps(); ++i) {
    EXPECT_LT(tr.times()[i], tr.times()[i + 1]);
    const Vec a = tr.at_step(i, 0.0), b = tr.at_step(i, 1.0);
    for (int k = 0; k < 2; ++k) {
      EXPECT_LE(std::abs(a[k] - tr.states()[i][k]), 4 * eps * std::abs(tr.states()[i][k]));
      EXPECT_LE(std::abs(b[k] - tr.states()[i + 1][k]), 4 * eps * std::abs(tr.states()[i + 1][k]));
    }
  }
  EXPECT_THROW(tr.at(t_end + 1.0), ContractViolation);
}

TEST(Ode, SectionDirectionIsRespected) {
  const auto sys = oscillator();
  SectionSpec sec;
  sec.g = [](const Vec& s) { return s[0]; };
  sec.direction = CrossingDirection::Decreasing;
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(integrate_to_section(sys, make_state(1, 0), sec).hit.t_hit, pi / 2, 1e-9);
  sec.direction = CrossingDirection::Increasing;
  EXPECT_NEAR(integrate_to_section(sys, make_state(1, 0), sec).hit.t_hit, 3 * pi / 2, 1e-9);
  sec.direction = CrossingDirection::Any;
  EXPECT_NEAR(integrate_to_section(sys, make_state(1, 0), sec).hit.t_hit, pi / 2, 1e-9);
}

TEST(Ode, SectionErrors) {
  const auto sys = oscillator();
  SectionSpec sec;
  sec.g = [](const Vec& s) { return s[0] - 2.0; };
  IntegratorConfig cfg;
  cfg.max_time = 20.0;
  EXPECT_THROW(integrate_to_section(sys, make_state(1, 0), sec, cfg), NoCrossing);

  sec.g = [](const Vec& s) { return s[0] - 1.0; };
  EXPECT_THROW(integrate_to_section(sys, make_state(1, 0), sec, cfg), ContractViolation);
  EXPECT_THROW(integrate_to_section(sys, make_state(1, 0), SectionSpec{}, cfg), ContractViolation);
}

TEST(Ode, StepBudgetIsEnforced) {
  IntegratorConfig cfg;
  cfg.max_steps = 5;
  EXPECT_THROW(integrate(oscillator(), make_state(1, 0), 100.0, cfg), BudgetExceeded);
}

TEST(Ode, StepFloorReportsStiffness) {
  IntegratorConfig cfg;
  cfg.min_step = 0.5;
  cfg.max_step = 1.0;
  cfg.rel_tol = 1e-14;
  cfg.abs_tol = 1e-14;
  EXPECT_THROW(integrate(oscillator(), make_state(1, 0), 10.0, cfg), StiffnessFailure);
}

TEST(Ode, ConfigValidation) {
  IntegratorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rel_tol = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.min_step = 2;
  cfg.max_step = 1;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.newton_max_iters = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(Ode, ErrorShrinksUnderToleranceTightening) {
  const auto sys = linear_system(LinearLorenzParams(1.0, 0.5, 2.0));
  const double exact = -std::log(1e-4);
  double prev = std::numeric_limits<double>::infinity();
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegratorConfig cfg;
    cfg.rel_tol = tol;
    cfg.abs_tol = tol;
    const double err = std::abs(integrate_to_section(sys, make_state(1e-4, 0.0, 1.0), exit_right(), cfg).hit.t_hit - exact);
    EXPECT_LT(err, prev) << "rel_tol = " << tol;
    prev = err;
  }
}

TEST(Ode, RepeatedRunsAreBitIdentical) {
  const auto sys = neutral_system(planar());
  const auto a = integrate_to_section(sys, make_state(1e-3, 1.0), exit_right());
  const auto b = integrate_to_section(sys, make_state(1e-3, 1.0), exit_right());
  EXPECT_EQ(a.hit.t_hit, b.hit.t_hit);
  EXPECT_EQ(a.hit.s_hit, b.hit.s_hit);
  ASSERT_EQ(a.trajectory.size(), b.trajectory.size());
  EXPECT_EQ(a.trajectory.times(), b.trajectory.times());
}

TEST(Ode, TrajectoryCsvLeavesPlanarZEmpty) {
  const Trajectory tr = integrate(neutral_system(planar()), make_state(0.5, 0.5), 0.0);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  EXPECT_EQ(os.str(), "t,x,y,z\n0,0.5,0.5,\n");
}
