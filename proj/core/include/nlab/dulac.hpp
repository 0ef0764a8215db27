#pragma once

// Transit from the unstable leaf through the neutral saddle to the stable leaf {x = +-1}.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlab/csv.hpp"
#include "nlab/fields.hpp"
#include "nlab/ode.hpp"

namespace nlab {

/// Starting coordinates on the unstable leaf besides x0. z0 is ignored in 2-D.
struct LeafAnchors {
  double y0 = 1.0;
  double z0 = 1.0;
};

enum class SampleStatus { Ok, NoCrossing, StiffnessFailure, BudgetExceeded, Failed };

std::string_view to_string(SampleStatus s);
SampleStatus sample_status_from_string(std::string_view s);

struct DulacSample {
  double x0 = 0.0;
  double y0 = 0.0;
  std::optional<double> z0;
  SectionHit exit;
  /// Exit coordinate transversal to the stable leaf: y in 2-D, z in 3-D.
  double omega = 0.0;
  /// Flow time to the stable leaf.
  double tau = 0.0;
  /// Integral of c0 x^2 + c2 z^2 along the transit (3-D models with c-terms), else 0.
  double q = 0.0;
  SampleStatus status = SampleStatus::Ok;
  std::string message;

  bool ok() const { return status == SampleStatus::Ok; }
};

struct DulacOptions {
  IntegratorConfig integrator;
  /// When set, the time limit is max(budget_floor, budget_factor * zeta_hat * |x0|^(-1/beta2));
  /// otherwise integrator.max_time is used.
  std::optional<double> zeta_hat = 1.0;
  double budget_factor = 10.0;
  double budget_floor = 100.0;
};

/// Integrates from (x0, y0) [2-D] or (x0, y0, z0) [3-D] to x = sign(x0).
/// Throws the integrator's errors with x0 in the message.
DulacSample dulac_map(const NeutralParams& p, double x0, const LeafAnchors& anchors = {},
                      const DulacOptions& opts = {});

struct DulacConstants {
  double c = 1.0;    ///< omega ~ c |x0|^beta
  double c_t = 1.0;  ///< tau ~ c_t |x0|^(-1/beta2)
};

struct AsymptoticPrediction {
  double omega_pred = 0.0;
  double tau_pred = 0.0;
  DulacConstants constants;
};

/// Leading-order power laws. Throws ContractViolation for nonpositive constants.
AsymptoticPrediction predict(const NeutralParams& p, double x0, const DulacConstants& constants);

enum class Spacing { Log, Linear };

/// n points ordered from x_max (index 0) down to x_min (index n-1).
std::vector<double> make_grid(double x_min, double x_max, std::size_t n, Spacing spacing = Spacing::Log);

/// One sample per grid point, in grid order. Per-point failures are recorded in the
/// sample status; throws SweepFailure if every point fails.
std::vector<DulacSample> sweep(const NeutralParams& p, const std::vector<double>& x_grid,
                               const LeafAnchors& anchors = {}, const DulacOptions& opts = {},
                               unsigned workers = 0);

/// `x0,omega,tau,status` with 17 significant digits, optional `#` metadata block first.
void write_sweep_csv(std::ostream& os, const std::vector<DulacSample>& samples, const Metadata& meta = {});
std::vector<DulacSample> read_sweep_csv(std::istream& is, Metadata* meta = nullptr);

}  // namespace nlab
