#pragma once

#include <Eigen/Dense>

namespace nlab {

// Largest state handled by the integrators: (x, y, z) plus one quadrature channel.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

}  // namespace nlab
