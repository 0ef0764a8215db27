#pragma once

// Reference computations written independently of the library.

#include <cstddef>

namespace oracle {

struct Transit {
  double omega = 0.0;
  double tau = 0.0;
};

/// Planar cubic saddle x' = x(a0 x^2 + a2 y^2), y' = -y(b0 x^2 + b2 y^2) from (x0, y0) to x = 1.
/// Integrated with fixed-step RK4 in the rescaled time ds = (x^2 + y^2) dt, where the field is
/// regular at the origin; physical time is carried as an extra coordinate.
Transit planar_transit(double a0, double a2, double b0, double b2, double x0, double y0, double ds);

/// Lebesgue measure of {x in (0, 1] : zeta x^(-1/beta2) + tau2 > t}.
double lebesgue_roof_tail(double zeta, double beta2, double tau2, double t);

/// Maximum of the divergence of the unperturbed 3-D field over [-h, h]^3 by brute-force grid.
double grid_max_divergence(double a0, double a1, double a2, double b0, double b1, double b2, double c0, double c2,
                           double ell, double h, std::size_t n);

/// Slope of ordinary least squares through (x, y), straightforward normal equations.
double naive_slope(const double* x, const double* y, std::size_t n);

}  // namespace oracle
