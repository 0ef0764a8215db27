#include "nlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include "nlab/errors.hpp"
#include "nlab/rng.hpp"

namespace nlab {

PoincareParams::PoincareParams(NeutralParams base, double a_exp, double c_asym, double zeta,
                               std::optional<QFunction> q, ScalarFn tau2)
    : base_(std::move(base)), a_exp_(a_exp), c_asym_(c_asym), zeta_(zeta), q_(std::move(q)), tau2_(std::move(tau2)) {
  if (!(a_exp > 1.0) || !std::isfinite(a_exp)) throw ContractViolation("expansion factor a must exceed 1");
  if (!(c_asym > 0.0) || !std::isfinite(c_asym)) throw ContractViolation("Dulac constant c must be positive");
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ContractViolation("flow-time constant zeta must be positive");
  if (q_ && (!q_->value || !q_->derivative)) throw ContractViolation("q needs both a value and a derivative");
  const auto e = derived_exponents(base_);
  beta_ = e.beta;
  beta2_ = e.beta2;
}

PoincareParams PoincareParams::with_zeta(double zeta) const {
  return PoincareParams(base_, a_exp_, c_asym_, zeta, q_, tau2_);
}

namespace {

double q_at(const PoincareParams& p, double ax) {
  if (!p.q()) return 0.0;
  const double q = p.q()->value(ax);
  if (!(q >= 0.0)) throw ContractViolation("q(x) must be nonnegative");
  return q;
}

void require_nonzero(double x) {
  if (x == 0.0) throw SingularInput("map evaluated at x = 0");
}

}  // namespace

double f_neu(const PoincareParams& p, double x) {
  require_nonzero(x);
  const double a = p.a_exp() * p.c_asym() * std::pow(std::abs(x), p.beta());
  return x > 0.0 ? a - 1.0 : 1.0 - a;
}

double f_neu_checked(const PoincareParams& p, double x) {
  if (!(std::abs(x) <= 1.0)) throw ContractViolation("x outside [-1, 1]");
  const double fx = f_neu(p, x);
  if (!(std::abs(fx) <= 1.0)) {
    throw DomainEscape("image " + format_double(fx) + " of x = " + format_double(x) +
                       " leaves [-1, 1]; a * c is too large");
  }
  return fx;
}

double fiber_contraction(const PoincareParams& p, double x) {
  require_nonzero(x);
  const double ax = std::abs(x);
  return std::exp(-p.ell() * (p.zeta() * std::pow(ax, -1.0 / p.beta2()) + q_at(p, ax)));
}

SigmaPoint p_neu(const PoincareParams& p, const SigmaPoint& s) {
  if (!(std::abs(s.y) <= 1.0)) throw ContractViolation("y outside [-1, 1]");
  const double fx = f_neu_checked(p, s.x);
  const double l2 = fiber_contraction(p, s.x);
  const double gy = s.x > 0.0 ? s.y * l2 - 0.5 : s.y * l2 + 0.5;
  if (!(std::abs(gy) <= 1.0)) {
    throw DomainEscape("fiber image " + format_double(gy) + " of (" + format_double(s.x) + ", " +
                       format_double(s.y) + ") leaves [-1, 1]; ell * zeta is too small");
  }
  return {fx, gy};
}

Eigenvalues jacobian_eigenvalues(const PoincareParams& p, double x) {
  require_nonzero(x);
  Eigenvalues ev;
  ev.lambda1 = p.a_exp() * p.c_asym() * p.beta() * std::pow(std::abs(x), p.beta() - 1.0);
  ev.lambda2 = fiber_contraction(p, x);
  return ev;
}

double dg_dy(const PoincareParams& p, double x, double) { return fiber_contraction(p, x); }

double dg_dx(const PoincareParams& p, double x, double y) {
  require_nonzero(x);
  const double ax = std::abs(x);
  double rate = p.zeta() / p.beta2() * std::pow(ax, -1.0 / p.beta2() - 1.0);
  if (p.q()) rate -= p.q()->derivative(ax);
  const double sign = x > 0.0 ? 1.0 : -1.0;
  return y * p.ell() * rate * fiber_contraction(p, x) * sign;
}

double r_neu(const PoincareParams& p, double x) {
  require_nonzero(x);
  return p.zeta() * std::pow(std::abs(x), -1.0 / p.beta2()) + p.tau2(x);
}

OrbitResult iterate_orbit(const PoincareParams& p, const SigmaPoint& p0, std::size_t n, std::uint64_t seed,
                          std::size_t histogram_bins) {
  if (n == 0) throw ContractViolation("orbit length must be at least 1");
  if (!(std::abs(p0.x) <= 1.0) || !(std::abs(p0.y) <= 1.0)) throw ContractViolation("orbit start outside Sigma");
  if (histogram_bins == 0) throw ContractViolation("histogram needs at least one bin");
  Rng rng(seed);
  auto unpin = [&](double x) { return x != 0.0 ? x : (rng.uniform() < 0.5 ? -1e-12 : 1e-12); };

  OrbitResult out;
  out.histogram.assign(histogram_bins, 0);
  out.points.reserve(n);
  out.r_values.reserve(n);
  SigmaPoint cur{unpin(p0.x), p0.y};
  for (std::size_t k = 0; k < n; ++k) {
    SigmaPoint next;
    try {
      next = p_neu(p, cur);
    } catch (const DomainEscape& e) {
      out.status = OrbitStatus::Escaped;
      out.message = "escaped at step " + std::to_string(k) + ": " + e.what();
      break;
    }
    out.points.push_back(cur);
    out.r_values.push_back(r_neu(p, cur.x));
    auto bin = std::min(static_cast<std::size_t>((std::abs(cur.x) + 1.0) * 0.5 * static_cast<double>(histogram_bins)),
                        histogram_bins - 1);
    if (cur.x < 0.0) bin = histogram_bins - 1 - bin;
    ++out.histogram[bin];
    ++out.steps_completed;
    out.last = next;
    cur = {unpin(next.x), next.y};
  }
  if (out.steps_completed == 0) out.last = cur;
  return out;
}

void write_orbit_csv(std::ostream& os, const OrbitResult& orbit, const Metadata& meta) {
  write_metadata(os, meta);
  os << "step,x,y,r_neu\n";
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    os << k << ',' << format_double(orbit.points[k].x) << ',' << format_double(orbit.points[k].y) << ','
       << format_double(orbit.r_values[k]) << '\n';
  }
  if (orbit.status == OrbitStatus::Escaped) os << "# status: " << orbit.message << '\n';
}

GPropertyReport check_g_properties(const PoincareParams& p, const std::vector<SigmaPoint>& grid,
                                   std::size_t iterations) {
  if (grid.empty()) throw ContractViolation("g-property grid is empty");
  GPropertyReport r;
  r.g3_iterations = iterations;
  for (const auto& s : grid) {
    if (s.x == 0.0) throw ContractViolation("g-property grid contains x = 0");
    const double dy = std::abs(dg_dy(p, s.x, s.y));
    const double dx = std::abs(dg_dx(p, s.x, s.y));
    r.eta = std::max(r.eta, dy);
    if (!std::isfinite(dx)) {
      r.g2b_ok = false;
      r.violations.push_back("g2b: dg/dx not finite at (" + format_double(s.x) + ", " + format_double(s.y) + ")");
    } else {
      r.sup_dgdx = std::max(r.sup_dgdx, dx);
    }
    if (!(dy < 1.0)) {
      r.g1_ok = false;
      r.violations.push_back("g1: |dg/dy| = " + format_double(dy) + " at (" + format_double(s.x) + ", " +
                             format_double(s.y) + ")");
    }
  }
  r.g2a_ok = r.eta < 1.0;
  if (!r.g2a_ok) r.violations.push_back("g2a: eta = " + format_double(r.eta) + " is not below 1");

  const double lz = p.ell() * p.zeta();
  r.probe_x = std::min(1.0, std::pow(lz / 50.0, p.beta2()));
  r.dgdx_near_zero = std::abs(dg_dx(p, r.probe_x, 1.0));
  if (!(r.dgdx_near_zero < 1e-6)) {
    r.g2b_ok = false;
    r.violations.push_back("g2b: |dg/dx| = " + format_double(r.dgdx_near_zero) + " near x = 0");
  }

  const double eta_sigma = std::max({r.eta, fiber_contraction(p, 1.0), fiber_contraction(p, -1.0)});
  for (const auto& s : grid) {
    if (s.y == 0.0) continue;
    // Leaf distance carried through the fiber derivative (g is affine in y).
    SigmaPoint a{s.x, s.y};
    const double d0 = 2.0 * std::abs(s.y);
    double dn = d0;
    bool escaped = false;
    for (std::size_t k = 0; k < iterations; ++k) {
      if (a.x == 0.0) {
        escaped = true;
        break;
      }
      try {
        const SigmaPoint next = p_neu(p, a);
        dn *= std::abs(dg_dy(p, a.x, a.y));
        a = next;
      } catch (const DomainEscape&) {
        escaped = true;
        break;
      }
    }
    if (escaped) continue;
    ++r.g3_pairs_checked;
    const double bound = d0 * std::pow(eta_sigma, static_cast<double>(iterations));
    const double ratio = bound > 0.0 ? dn / bound : (dn == 0.0 ? 0.0 : INFINITY);
    r.g3_worst_ratio = std::max(r.g3_worst_ratio, ratio);
    if (ratio > 1.0 + 1e-9) {
      r.g3_ok = false;
      r.violations.push_back("g3: leaf pair at (" + format_double(s.x) + ", +-" + format_double(s.y) +
                             ") contracts slower than eta^n");
    }
  }
  return r;
}

std::vector<SigmaPoint> sigma_grid(std::size_t n_x, std::size_t n_y) {
  if (n_x == 0 || n_y < 2) throw ContractViolation("sigma grid needs n_x >= 1 and n_y >= 2");
  std::vector<SigmaPoint> grid;
  grid.reserve(2 * n_x * n_y);
  for (std::size_t i = 1; i <= n_x; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n_x);
    for (double sx : {-x, x}) {
      for (std::size_t j = 0; j < n_y; ++j) {
        grid.push_back({sx, -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(n_y - 1)});
      }
    }
  }
  return grid;
}

void write_g_report(std::ostream& os, const GPropertyReport& r) {
  auto flag = [](bool ok) { return ok ? "ok" : "violated"; };
  os << "g1: " << flag(r.g1_ok) << '\n';
  os << "g2a: " << flag(r.g2a_ok) << '\n';
  os << "eta: " << format_double(r.eta) << '\n';
  os << "g2b: " << flag(r.g2b_ok) << '\n';
  os << "sup_dgdx: " << format_double(r.sup_dgdx) << '\n';
  os << "probe_x: " << format_double(r.probe_x) << '\n';
  os << "dgdx_near_zero: " << format_double(r.dgdx_near_zero) << '\n';
  os << "g3: " << flag(r.g3_ok) << '\n';
  os << "g3_iterations: " << r.g3_iterations << '\n';
  os << "g3_pairs_checked: " << r.g3_pairs_checked << '\n';
  os << "g3_worst_ratio: " << format_double(r.g3_worst_ratio) << '\n';
  for (const auto& v : r.violations) os << "violation: " << v << '\n';
}

QTable::QTable(std::vector<double> abs_x, std::vector<double> q) {
  if (abs_x.size() != q.size() || abs_x.size() < 2) throw ContractViolation("q table needs at least two points");
  std::vector<std::size_t> order(abs_x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return abs_x[a] < abs_x[b]; });
  for (std::size_t i : order) {
    if (!(abs_x[i] > 0.0) || !(q[i] >= 0.0)) throw ContractViolation("q table needs x > 0 and q >= 0");
    if (!log_x_.empty() && std::log(abs_x[i]) <= log_x_.back()) continue;
    log_x_.push_back(std::log(abs_x[i]));
    q_.push_back(q[i]);
  }
  if (log_x_.size() < 2) throw ContractViolation("q table needs two distinct abscissae");
}

QTable QTable::from_samples(const std::vector<DulacSample>& samples) {
  std::vector<double> xs, qs;
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    xs.push_back(std::abs(s.x0));
    qs.push_back(s.q);
  }
  return QTable(std::move(xs), std::move(qs));
}

double QTable::value(double x) const {
  const double lx = std::log(std::abs(x));
  if (lx <= log_x_.front()) return q_.front();
  if (lx >= log_x_.back()) return q_.back();
  const auto it = std::upper_bound(log_x_.begin(), log_x_.end(), lx);
  const std::size_t i = static_cast<std::size_t>(it - log_x_.begin()) - 1;
  const double u = (lx - log_x_[i]) / (log_x_[i + 1] - log_x_[i]);
  return q_[i] + u * (q_[i + 1] - q_[i]);
}

double QTable::derivative(double x) const {
  const double ax = std::abs(x);
  const double lx = std::log(ax);
  if (lx <= log_x_.front() || lx >= log_x_.back()) return 0.0;
  const auto it = std::upper_bound(log_x_.begin(), log_x_.end(), lx);
  const std::size_t i = static_cast<std::size_t>(it - log_x_.begin()) - 1;
  return (q_[i + 1] - q_[i]) / (log_x_[i + 1] - log_x_[i]) / ax;
}

QFunction QTable::function() const {
  auto self = std::make_shared<QTable>(*this);
  return {[self](double x) { return self->value(x); }, [self](double x) { return self->derivative(x); }};
}

}  // namespace nlab
