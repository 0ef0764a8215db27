#include <algorithm>
#include <cmath>
#include <string>

#include "nlab/errors.hpp"
#include "nlab/ode.hpp"
#include "radau_tableau.hpp"

namespace nlab {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ContractViolation("tolerances must be positive");
  if (!(min_step > 0.0) || !(max_step > 0.0) || !(min_step < max_step)) {
    throw ContractViolation("step bounds must satisfy 0 < min_step < max_step");
  }
  if (!(max_time > 0.0)) throw ContractViolation("max_time must be positive");
  if (!(newton_tol > 0.0) || newton_max_iters < 1) throw ContractViolation("invalid Newton settings");
  if (!(event_tol > 0.0)) throw ContractViolation("event_tol must be positive");
  if (initial_step < 0.0) throw ContractViolation("initial_step must be nonnegative");
  if (max_steps == 0) throw ContractViolation("max_steps must be positive");
}

namespace {

constexpr int kMaxStage = 3 * kMaxDim;
using StageMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxStage, kMaxStage>;
using StageVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStage, 1>;

bool crosses(double g_prev, double g_now, CrossingDirection dir) {
  const bool up = g_prev < 0.0 && g_now >= 0.0;
  const bool down = g_prev > 0.0 && g_now <= 0.0;
  switch (dir) {
    case CrossingDirection::Increasing: return up;
    case CrossingDirection::Decreasing: return down;
    case CrossingDirection::Any: return up || down;
  }
  return false;
}

class RadauStepper {
 public:
  RadauStepper(const OdeSystem& sys, const IntegratorConfig& cfg) : sys_(sys), cfg_(cfg), n_(sys.dim) {}

  Trajectory run(const Vec& s0, double t_end, const SectionSpec* sec, SectionHit* hit);

 private:
  double scaled_rms(const Vec& v, const Vec& scale) const {
    return std::sqrt((v.array() / scale.array()).square().sum() / n_);
  }

  Vec scale_for(const Vec& a, const Vec& b) const {
    return (cfg_.abs_tol + cfg_.rel_tol * a.array().abs().max(b.array().abs())).matrix();
  }

  Vec rhs(const Vec& s, IntegratorStats& st) const {
    Vec out(n_);
    sys_.rhs(s, out);
    ++st.rhs_evals;
    return out;
  }

  double localize(const Trajectory& traj, const SectionSpec& sec, double g_a, double g_b, double& theta_out) const;

  const OdeSystem& sys_;
  IntegratorConfig cfg_;
  int n_;
};

double RadauStepper::localize(const Trajectory& traj, const SectionSpec& sec, double g_a, double g_b,
                              double& theta_out) const {
  const std::size_t step = traj.steps() - 1;
  auto G = [&](double theta) { return sec.g(traj.at_step(step, theta)); };
  double a = 0.0, b = 1.0;
  double fa = g_a, fb = g_b;
  if (std::abs(fb) <= cfg_.event_tol) {
    theta_out = 1.0;
    return std::abs(fb);
  }
  double best_theta = std::abs(fa) < std::abs(fb) ? a : b;
  double best_val = std::min(std::abs(fa), std::abs(fb));
  int side = 0;
  double width = b - a;
  int stalled = 0;
  for (int it = 0; it < 400; ++it) {
    double theta;
    if (stalled >= 2) {
      theta = 0.5 * (a + b);
      stalled = 0;
    } else {
      theta = (a * fb - b * fa) / (fb - fa);
      if (!(theta > a && theta < b)) theta = 0.5 * (a + b);
    }
    const double ft = G(theta);
    if (std::abs(ft) < best_val) {
      best_val = std::abs(ft);
      best_theta = theta;
    }
    if (best_val <= cfg_.event_tol) break;
    if ((ft < 0.0) == (fa < 0.0)) {
      a = theta;
      fa = ft;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = theta;
      fb = ft;
      if (side == +1) fa *= 0.5;
      side = +1;
    }
    const double new_width = b - a;
    stalled = new_width > 0.5 * width ? stalled + 1 : 0;
    width = new_width;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon()) break;
  }
  theta_out = best_theta;
  return best_val;
}

Trajectory RadauStepper::run(const Vec& s0, double t_end, const SectionSpec* sec, SectionHit* hit) {
  cfg_.validate();
  if (s0.size() != n_) throw ContractViolation("initial state dimension does not match the system");
  if (!s0.allFinite()) throw ContractViolation("initial state is not finite");

  Trajectory traj(0.0, s0, Trajectory::Interpolant::Collocation);
  IntegratorStats& st = traj.stats;
  const double t_stop = sec ? cfg_.max_time : t_end;
  double g_prev = 0.0;
  if (sec) {
    g_prev = sec->g(s0);
    if (g_prev == 0.0) throw ContractViolation("initial state lies on the section (g(s0) = 0)");
  } else if (t_end == 0.0) {
    return traj;
  }

  double t = 0.0;
  Vec y = s0;
  Vec f0 = rhs(y, st);

  double h = cfg_.initial_step;
  if (h <= 0.0) {
    const Vec sc = scale_for(y, y);
    const double d0 = scaled_rms(y, sc), d1 = scaled_rms(f0, sc);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::clamp(h, 10.0 * cfg_.min_step, cfg_.max_step);

  const double c[3] = {radau::kC1, radau::kC2, 1.0};
  const int nit = cfg_.newton_max_iters;
  bool first = true;
  bool last_rejected = false;
  double eta_prev = 1.0;
  double h_prev = 0.0;

  Mat jac(n_, n_);
  StageMat M(3 * n_, 3 * n_);
  StageVec Z(3 * n_), R(3 * n_), dZ(3 * n_);
  Vec F[3];

  while (true) {
    if (st.accepted + st.rejected >= cfg_.max_steps) {
      throw BudgetExceeded("integrator exceeded " + std::to_string(cfg_.max_steps) + " steps at t = " +
                           std::to_string(t));
    }
    if (t >= t_stop) {
      if (sec) {
        throw NoCrossing("no section crossing before t = " + std::to_string(cfg_.max_time));
      }
      break;
    }

    h = std::min(h, cfg_.max_step);
    if (t + h >= t_stop || t + 1.01 * h >= t_stop) h = t_stop - t;

    sys_.jacobian(y, jac);
    ++st.jacobian_evals;

    // Simplified Newton on the stage increments Z_i = Y_i - y with (I - h A (x) J).
    int newton_iters = 0;
    double eta = eta_prev;
    while (true) {
      M.setIdentity();
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M.block(i * n_, j * n_, n_, n_) -= h * radau::kA[i][j] * jac;
      }
      Eigen::PartialPivLU<StageMat> lu(M);

      if (!first) {
        for (int i = 0; i < 3; ++i) {
          Z.segment(i * n_, n_) = traj.at_step(traj.steps() - 1, 1.0 + c[i] * h / h_prev) - y;
        }
      } else {
        Z.setZero();
      }

      const Vec sc = scale_for(y, y);
      bool converged = false;
      double norm_prev = 0.0;
      eta = std::pow(std::max(eta_prev, std::numeric_limits<double>::epsilon()), 0.8);
      newton_iters = 0;
      for (int k = 0; k < nit; ++k) {
        ++newton_iters;
        bool finite = true;
        for (int i = 0; i < 3; ++i) {
          F[i] = rhs(y + Z.segment(i * n_, n_), st);
          finite = finite && F[i].allFinite();
        }
        if (!finite) break;
        for (int i = 0; i < 3; ++i) {
          Vec acc = Vec::Zero(n_);
          for (int j = 0; j < 3; ++j) acc += radau::kA[i][j] * F[j];
          R.segment(i * n_, n_) = -Z.segment(i * n_, n_) + h * acc;
        }
        dZ = lu.solve(R);
        double norm = 0.0;
        for (int i = 0; i < 3; ++i) norm += std::pow(scaled_rms(dZ.segment(i * n_, n_), sc), 2);
        norm = std::sqrt(norm / 3.0);
        if (!std::isfinite(norm)) break;
        if (k > 0) {
          const double theta = norm / norm_prev;
          if (theta >= 0.99) break;
          eta = theta / (1.0 - theta);
          if (std::pow(theta, nit - 1 - k) / (1.0 - theta) * norm > cfg_.newton_tol) break;
        }
        Z += dZ;
        norm_prev = norm;
        if (eta * norm <= cfg_.newton_tol || norm == 0.0) {
          converged = true;
          break;
        }
      }
      if (converged) break;

      ++st.newton_failures;
      h *= 0.5;
      if (h < cfg_.min_step) {
        throw StiffnessFailure("Newton iteration failed to converge at the step-size floor (t = " +
                               std::to_string(t) + ")");
      }
    }

    // Embedded error estimate.
    const Vec z1 = Z.segment(0, n_), z2 = Z.segment(n_, n_), z3 = Z.segment(2 * n_, n_);
    const Vec y_new = y + z3;
    const Vec sc = scale_for(y, y_new);
    Mat E = (radau::kU1 / h) * Mat::Identity(n_, n_) - jac;
    Eigen::PartialPivLU<Mat> lu_e(E);
    const Vec f2 = (radau::kD1 * z1 + radau::kD2 * z2 + radau::kD3 * z3) / h;
    Vec e = lu_e.solve(Vec(f0 + f2));
    double err = scaled_rms(e, sc);
    if (err >= 1.0 && (first || last_rejected)) {
      e = lu_e.solve(Vec(rhs(y + e, st) + f2));
      err = scaled_rms(e, sc);
    }
    if (!std::isfinite(err)) err = 1e10;
    err = std::max(err, 1e-10);

    const double fac = std::min(0.9, 0.9 * (1.0 + 2.0 * nit) / (newton_iters + 2.0 * nit));
    const double quot = std::clamp(std::pow(err, 0.25) / fac, 1.0 / 8.0, 5.0);
    double h_new = h / quot;

    if (err < 1.0) {
      ++st.accepted;
      const double t_new = (h == t_stop - t) ? t_stop : t + h;
      traj.push_step(t_new, y_new, Vec(y + z1), Vec(y + z2));

      if (sec) {
        const double g_now = sec->g(y_new);
        if (crosses(g_prev, g_now, sec->direction)) {
          double theta = 1.0;
          const double residual = localize(traj, *sec, g_prev, g_now, theta);
          hit->t_hit = theta == 1.0 ? t_new : t + theta * h;
          hit->s_hit = traj.at_step(traj.steps() - 1, theta);
          hit->residual = residual;
          traj.stop_reason = StopReason::SectionHit;
          return traj;
        }
        g_prev = g_now;
      }

      t = t_new;
      y = y_new;
      f0 = rhs(y, st);
      h_prev = h;
      eta_prev = eta;
      first = false;
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      ++st.rejected;
      h = (first && !last_rejected) ? 0.1 * h : h_new;
      last_rejected = true;
      if (h < cfg_.min_step) {
        throw StiffnessFailure("step size fell below min_step at t = " + std::to_string(t));
      }
    }
  }
  traj.stop_reason = StopReason::ReachedEnd;
  return traj;
}

}  // namespace

Trajectory integrate(const OdeSystem& sys, const Vec& s0, double t_end, const IntegratorConfig& cfg) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ContractViolation("t_end must be finite and nonnegative");
  RadauStepper stepper(sys, cfg);
  return stepper.run(s0, t_end, nullptr, nullptr);
}

SectionResult integrate_to_section(const OdeSystem& sys, const Vec& s0, const SectionSpec& sec,
                                   const IntegratorConfig& cfg) {
  if (!sec.g) throw ContractViolation("section has no event function");
  RadauStepper stepper(sys, cfg);
  SectionResult result;
  result.trajectory = stepper.run(s0, 0.0, &sec, &result.hit);
  return result;
}

}  // namespace nlab
