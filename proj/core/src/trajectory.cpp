#include <algorithm>
#include <ostream>

#include "nlab/csv.hpp"
#include "nlab/errors.hpp"
#include "nlab/ode.hpp"
#include "radau_tableau.hpp"

namespace nlab {

Trajectory::Trajectory(double t0, Vec s0, Interpolant kind) : kind_(kind) {
  times_.push_back(t0);
  states_.push_back(std::move(s0));
}

void Trajectory::push_step(double t1, Vec s1, Vec inner0, Vec inner1) {
  times_.push_back(t1);
  states_.push_back(std::move(s1));
  inner0_.push_back(std::move(inner0));
  inner1_.push_back(std::move(inner1));
}

Vec Trajectory::at_step(std::size_t step, double theta) const {
  if (step >= steps()) throw ContractViolation("trajectory step index out of range");
  const Vec& y0 = states_[step];
  const Vec& y1 = states_[step + 1];
  if (kind_ == Interpolant::Hermite) {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y0 + h10 * inner0_[step] + h01 * y1 + h11 * inner1_[step];
  }
  // Lagrange basis on the nodes 0, c1, c2, 1; the denominators are formed with the same
  // operations as the numerators so the basis is exactly 0/1 at the endpoints.
  const double nodes[4] = {0.0, radau::kC1, radau::kC2, 1.0};
  const Vec* values[4] = {&y0, &inner0_[step], &inner1_[step], &y1};
  Vec out = Vec::Zero(y0.size());
  for (int k = 0; k < 4; ++k) {
    double num = 1.0, den = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      num *= theta - nodes[j];
      den *= nodes[k] - nodes[j];
    }
    out += (num / den) * *values[k];
  }
  return out;
}

Vec Trajectory::at(double t) const {
  if (times_.empty()) throw ContractViolation("empty trajectory");
  if (t < times_.front() || t > times_.back()) {
    throw ContractViolation("dense output requested outside the integrated interval");
  }
  if (steps() == 0) return states_.front();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t step = it == times_.end() ? steps() - 1 : static_cast<std::size_t>(it - times_.begin()) - 1;
  const double h = times_[step + 1] - times_[step];
  return at_step(step, (t - times_[step]) / h);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,z\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec& s = traj.states()[i];
    os << format_double(traj.times()[i]) << ',' << format_double(s[0]) << ',' << format_double(s[1]) << ',';
    if (s.size() >= 3) os << format_double(s[2]);
    os << '\n';
  }
}

}  // namespace nlab
