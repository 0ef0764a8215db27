#pragma once

#include <functional>

#include "nlab/linalg.hpp"

namespace nlab {

/// An autonomous ODE  ds/dt = rhs(s)  with its exact Jacobian.
struct OdeSystem {
  int dim = 0;
  std::function<void(const Vec& s, Vec& ds)> rhs;
  std::function<void(const Vec& s, Mat& jac)> jacobian;

  Vec operator()(const Vec& s) const {
    Vec out(dim);
    rhs(s, out);
    return out;
  }
};

}  // namespace nlab
