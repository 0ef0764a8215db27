#pragma once

// Adaptive 3-stage Radau IIA integration (order 5) with collocation dense output and
// section-crossing detection, plus a fixed-step RK4 reference integrator.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "nlab/linalg.hpp"
#include "nlab/system.hpp"

namespace nlab {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-12;
  /// First trial step; 0 selects one from the local time scale |s| / |f(s)|.
  double initial_step = 0.0;
  /// Hard limit on integration time for section searches.
  double max_time = 1e7;
  /// Stopping threshold for the simplified Newton iteration, in units of the error tolerance.
  double newton_tol = 1e-2;
  int newton_max_iters = 7;
  std::size_t max_steps = 2'000'000;
  /// Required |g| at a localized section hit.
  double event_tol = 1e-12;

  /// Throws ContractViolation if any field is out of range.
  void validate() const;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  std::size_t jacobian_evals = 0;
  std::size_t newton_failures = 0;
};

enum class StopReason { ReachedEnd, SectionHit };

/// Accepted steps of an integration together with per-step interpolation data.
class Trajectory {
 public:
  enum class Interpolant {
    Collocation,  ///< cubic through theta = 0, c1, c2, 1 (Radau stages)
    Hermite,      ///< cubic Hermite from endpoint values and derivatives
  };

  Trajectory() = default;
  Trajectory(double t0, Vec s0, Interpolant kind);

  /// Appends the step ending at (t1, s1). `inner` holds the two stage states
  /// (Collocation) or h*f(s0), h*f(s1) (Hermite).
  void push_step(double t1, Vec s1, Vec inner0, Vec inner1);

  std::size_t size() const { return times_.size(); }
  std::size_t steps() const { return times_.empty() ? 0 : times_.size() - 1; }
  int dim() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& states() const { return states_; }
  double t_front() const { return times_.front(); }
  double t_back() const { return times_.back(); }
  const Vec& back() const { return states_.back(); }

  /// Dense output at time t in [t_front, t_back].
  Vec at(double t) const;
  /// Dense output on step i at normalized position theta in [0, 1].
  Vec at_step(std::size_t step, double theta) const;

  Interpolant interpolant() const { return kind_; }
  StopReason stop_reason = StopReason::ReachedEnd;
  IntegratorStats stats;

 private:
  Interpolant kind_ = Interpolant::Collocation;
  std::vector<double> times_;
  std::vector<Vec> states_;
  std::vector<Vec> inner0_;
  std::vector<Vec> inner1_;
};

enum class CrossingDirection { Increasing, Decreasing, Any };

/// Zero level set of a scalar event function, crossed in a given direction.
struct SectionSpec {
  std::function<double(const Vec&)> g;
  CrossingDirection direction = CrossingDirection::Any;
};

struct SectionHit {
  double t_hit = 0.0;
  Vec s_hit;
  double residual = 0.0;  ///< |g(s_hit)|
};

struct SectionResult {
  SectionHit hit;
  Trajectory trajectory;
};

/// Integrates over [0, t_end].
/// Throws StiffnessFailure, BudgetExceeded, ContractViolation.
Trajectory integrate(const OdeSystem& sys, const Vec& s0, double t_end, const IntegratorConfig& cfg = {});

/// Integrates until the first crossing of `sec` (up to cfg.max_time). g(s0) must be nonzero.
/// Throws NoCrossing in addition to the errors of integrate().
SectionResult integrate_to_section(const OdeSystem& sys, const Vec& s0, const SectionSpec& sec,
                                   const IntegratorConfig& cfg = {});

/// Classical fixed-step RK4; the final step is shortened to land on t_end.
/// Throws NumericalOverflow on a non-finite state.
Trajectory integrate_oracle(const OdeSystem& sys, const Vec& s0, double t_end, double fixed_step);

/// CSV with header `t,x,y,z` and 17 significant digits; z is left empty for planar states.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace nlab
