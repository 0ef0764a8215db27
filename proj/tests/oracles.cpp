#include "oracles.hpp"

#include <array>
#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

using State = std::array<double, 3>;  // x, y, t

struct Planar {
  double a0, a2, b0, b2;

  State rhs(const State& s) const {
    const double x = s[0], y = s[1];
    const double r2 = x * x + y * y;
    return {x * (a0 * x * x + a2 * y * y) / r2, -y * (b0 * x * x + b2 * y * y) / r2, 1.0 / r2};
  }
};

State axpy(const State& s, double h, const State& k) { return {s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]}; }

State rk4(const Planar& f, const State& s, double h) {
  const State k1 = f.rhs(s);
  const State k2 = f.rhs(axpy(s, h / 2, k1));
  const State k3 = f.rhs(axpy(s, h / 2, k2));
  const State k4 = f.rhs(axpy(s, h, k3));
  State out;
  for (int i = 0; i < 3; ++i) out[i] = s[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

}  // namespace

Transit planar_transit(double a0, double a2, double b0, double b2, double x0, double y0, double ds) {
  const Planar f{a0, a2, b0, b2};
  State s{x0, y0, 0.0};
  while (true) {
    const State next = rk4(f, s, ds);
    if (next[0] >= 1.0) break;
    s = next;
  }
  // Bisect the last partial step onto x = 1.
  double lo = 0.0, hi = ds;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rk4(f, s, mid)[0] < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const State end = rk4(f, s, 0.5 * (lo + hi));
  return {end[1], end[2]};
}

double lebesgue_roof_tail(double zeta, double beta2, double tau2, double t) {
  if (t <= tau2 + zeta) return 1.0;
  return std::pow(zeta / (t - tau2), beta2);
}

double grid_max_divergence(double a0, double a1, double a2, double b0, double b1, double b2, double c0, double c2,
                           double ell, double h, std::size_t n) {
  double best = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -h + 2 * h * static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double y = -h + 2 * h * static_cast<double>(j) / static_cast<double>(n - 1);
      for (std::size_t k = 0; k < n; ++k) {
        const double z = -h + 2 * h * static_cast<double>(k) / static_cast<double>(n - 1);
        // Trace of the Jacobian, differentiated by hand term by term.
        const double dfx = 3 * a0 * x * x + a1 * y * y + a2 * z * z;
        const double dfy = -ell * (1 + c0 * x * x + c2 * z * z);
        const double dfz = -(b0 * x * x + 3 * b2 * z * z + b1 * y * y);
        best = std::max(best, dfx + dfy + dfz);
      }
    }
  }
  return best;
}

double naive_slope(const double* x, const double* y, std::size_t n) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace oracle
