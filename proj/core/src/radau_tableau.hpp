#pragma once

// Butcher tableau of the 3-stage Radau IIA method and the constants of its
// embedded error estimator (Hairer & Wanner, RADAU5).

#include <cmath>

namespace nlab::radau {

inline const double kSqrt6 = std::sqrt(6.0);

inline const double kC1 = (4.0 - kSqrt6) / 10.0;
inline const double kC2 = (4.0 + kSqrt6) / 10.0;

inline const double kA[3][3] = {
    {(88.0 - 7.0 * kSqrt6) / 360.0, (296.0 - 169.0 * kSqrt6) / 1800.0, (-2.0 + 3.0 * kSqrt6) / 225.0},
    {(296.0 + 169.0 * kSqrt6) / 1800.0, (88.0 + 7.0 * kSqrt6) / 360.0, (-2.0 - 3.0 * kSqrt6) / 225.0},
    {(16.0 - kSqrt6) / 36.0, (16.0 + kSqrt6) / 36.0, 1.0 / 9.0},
};

// Real eigenvalue of A^{-1}.
inline const double kU1 = 30.0 / (6.0 + std::cbrt(81.0) - std::cbrt(9.0));

inline const double kD1 = -(13.0 + 7.0 * kSqrt6) / 3.0;
inline const double kD2 = (-13.0 + 7.0 * kSqrt6) / 3.0;
inline const double kD3 = -1.0 / 3.0;

}  // namespace nlab::radau
