#pragma once

// Explicit return map on the section Sigma = {|x| <= 1, |y| <= 1} and its quotient
// one-dimensional map, at leading order in the Dulac asymptotics.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlab/csv.hpp"
#include "nlab/dulac.hpp"
#include "nlab/fields.hpp"

namespace nlab {

using ScalarFn = std::function<double(double)>;

/// Extra flow-time integral of the Model 2 / Model 3 stable direction, as a function of |x|.
struct QFunction {
  ScalarFn value;
  ScalarFn derivative;
};

class PoincareParams {
 public:
  /// Throws ContractViolation unless a_exp > 1 and c_asym, zeta > 0.
  /// An empty tau2 means the constant 1.
  PoincareParams(NeutralParams base, double a_exp, double c_asym, double zeta, std::optional<QFunction> q = {},
                 ScalarFn tau2 = {});

  const NeutralParams& base() const { return base_; }
  double a_exp() const { return a_exp_; }
  double c_asym() const { return c_asym_; }
  double zeta() const { return zeta_; }
  const std::optional<QFunction>& q() const { return q_; }
  double beta() const { return beta_; }
  double beta2() const { return beta2_; }
  double ell() const { return base_.coeffs().ell; }
  double tau2(double x) const { return tau2_ ? tau2_(x) : 1.0; }
  bool has_custom_tau2() const { return static_cast<bool>(tau2_); }

  /// Returns a copy with a different flow-time constant.
  PoincareParams with_zeta(double zeta) const;

 private:
  NeutralParams base_;
  double a_exp_, c_asym_, zeta_;
  std::optional<QFunction> q_;
  ScalarFn tau2_;
  double beta_, beta2_;
};

struct SigmaPoint {
  double x = 0.0;
  double y = 0.0;
};

/// x -> a c |x|^beta - 1 (x > 0), 1 - a c |x|^beta (x < 0). Throws SingularInput at x = 0.
double f_neu(const PoincareParams& p, double x);
/// Like f_neu but throws DomainEscape when the image leaves [-1, 1] and
/// ContractViolation when |x| > 1.
double f_neu_checked(const PoincareParams& p, double x);

/// Full map (f_neu(x), y lambda2(x) -+ 1/2). Throws SingularInput, DomainEscape, ContractViolation.
SigmaPoint p_neu(const PoincareParams& p, const SigmaPoint& s);

struct Eigenvalues {
  double lambda1 = 0.0;  ///< expansion a c beta |x|^(beta - 1)
  double lambda2 = 0.0;  ///< fiber contraction exp(-ell (zeta |x|^(-1/beta2) + q(|x|)))
};

Eigenvalues jacobian_eigenvalues(const PoincareParams& p, double x);
/// Fiber contraction factor lambda2(x).
double fiber_contraction(const PoincareParams& p, double x);
/// Partial derivatives of the y-component g(x, y) of p_neu.
double dg_dy(const PoincareParams& p, double x, double y);
double dg_dx(const PoincareParams& p, double x, double y);

/// zeta |x|^(-1/beta2) + tau2(x).
double r_neu(const PoincareParams& p, double x);

enum class OrbitStatus { Completed, Escaped };

struct OrbitResult {
  /// Points p_0 .. p_{k-1} where k = steps_completed.
  std::vector<SigmaPoint> points;
  std::vector<double> r_values;
  /// Image of the last recorded point; equals p_neu(p0) for n = 1.
  SigmaPoint last;
  std::size_t steps_completed = 0;
  OrbitStatus status = OrbitStatus::Completed;
  std::string message;
  /// Visit counts of x over `histogram_bins` equal bins of [-1, 1].
  std::vector<std::size_t> histogram;
};

/// Iterates p_neu n times from p0. A start (or iterate) exactly at x = 0 is moved to a
/// seeded random x of size 1e-12. DomainEscape ends the orbit and is recorded, not thrown.
OrbitResult iterate_orbit(const PoincareParams& p, const SigmaPoint& p0, std::size_t n, std::uint64_t seed,
                          std::size_t histogram_bins = 100);

/// `step,x,y,r_neu`, followed by `# status: ...` when the orbit escaped.
void write_orbit_csv(std::ostream& os, const OrbitResult& orbit, const Metadata& meta = {});

struct GPropertyReport {
  bool g1_ok = true;      ///< |dg/dy| < 1 at every grid point
  double eta = 0.0;       ///< sup |dg/dy| over the grid
  bool g2a_ok = true;     ///< eta < 1
  double sup_dgdx = 0.0;  ///< sup |dg/dx| over the grid
  /// |dg/dx| at the probe point where ell zeta |x|^(-1/beta2) = 50 (y = 1).
  double dgdx_near_zero = 0.0;
  double probe_x = 0.0;
  bool g2b_ok = true;
  /// Largest observed ratio distance_n / (eta^n distance_0) over the sampled leaf pairs.
  double g3_worst_ratio = 0.0;
  bool g3_ok = true;
  std::size_t g3_pairs_checked = 0;
  std::size_t g3_iterations = 0;
  std::vector<std::string> violations;

  bool ok() const { return g1_ok && g2a_ok && g2b_ok && g3_ok; }
};

/// Evaluates g1-g3 on the grid; fiber pairs (x, y) and (x, -y) are iterated `iterations` times.
GPropertyReport check_g_properties(const PoincareParams& p, const std::vector<SigmaPoint>& grid,
                                   std::size_t iterations = 10);
/// Regular n_x by n_y grid over Sigma excluding x = 0.
std::vector<SigmaPoint> sigma_grid(std::size_t n_x, std::size_t n_y);
void write_g_report(std::ostream& os, const GPropertyReport& r);

/// Tabulated q(|x|) built from sweep samples, linear in ln|x| and constant beyond the ends.
class QTable {
 public:
  QTable(std::vector<double> abs_x, std::vector<double> q);
  /// Uses the successful samples; throws ContractViolation with fewer than two.
  static QTable from_samples(const std::vector<DulacSample>& samples);

  double value(double x) const;
  double derivative(double x) const;
  QFunction function() const;

 private:
  std::vector<double> log_x_;
  std::vector<double> q_;
};

}  // namespace nlab
