#include <cmath>
#include <string>

#include "nlab/errors.hpp"
#include "nlab/ode.hpp"

namespace nlab {

Trajectory integrate_oracle(const OdeSystem& sys, const Vec& s0, double t_end, double fixed_step) {
  if (!(fixed_step > 0.0)) throw ContractViolation("fixed_step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ContractViolation("t_end must be finite and nonnegative");
  if (s0.size() != sys.dim) throw ContractViolation("initial state dimension does not match the system");

  Trajectory traj(0.0, s0, Trajectory::Interpolant::Hermite);
  if (t_end == 0.0) return traj;

  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / fixed_step - 1e-9));
  Vec y = s0;
  Vec k1(sys.dim), k2(sys.dim), k3(sys.dim), k4(sys.dim);
  sys.rhs(y, k1);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t0 = static_cast<double>(i) * fixed_step;
    const bool last = i + 1 == n_steps;
    const double t1 = last ? t_end : static_cast<double>(i + 1) * fixed_step;
    const double h = t1 - t0;
    sys.rhs(Vec(y + 0.5 * h * k1), k2);
    sys.rhs(Vec(y + 0.5 * h * k2), k3);
    sys.rhs(Vec(y + h * k3), k4);
    const Vec y1 = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y1.allFinite()) {
      throw NumericalOverflow("fixed-step integration produced a non-finite state at t = " + std::to_string(t1));
    }
    Vec f1(sys.dim);
    sys.rhs(y1, f1);
    traj.push_step(t1, y1, Vec(h * k1), Vec(h * f1));
    traj.stats.rhs_evals += 4;
    ++traj.stats.accepted;
    y = y1;
    k1 = f1;
  }
  return traj;
}

}  // namespace nlab
