#include "nlab/fields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "nlab/errors.hpp"

namespace nlab {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double eval_poly(const std::vector<Monomial>& terms, double x, double y, double z) {
  double sum = 0.0;
  for (const auto& m : terms) sum += m.coeff * ipow(x, m.px) * ipow(y, m.py) * ipow(z, m.pz);
  return sum;
}

// Partial derivative of a monomial list with respect to coordinate `axis` (0, 1, 2).
double eval_poly_partial(const std::vector<Monomial>& terms, int axis, double x, double y, double z) {
  double sum = 0.0;
  for (const auto& m : terms) {
    const int p[3] = {m.px, m.py, m.pz};
    if (p[axis] == 0) continue;
    double t = m.coeff * p[axis];
    const double c[3] = {x, y, z};
    for (int k = 0; k < 3; ++k) t *= ipow(c[k], k == axis ? p[k] - 1 : p[k]);
    sum += t;
  }
  return sum;
}

void require_dim(const NeutralParams& p, const Vec& s) {
  if (s.size() != p.dim()) {
    throw ContractViolation("state dimension " + std::to_string(s.size()) + " does not match model " +
                            std::string(to_string(p.model())) + " (dimension " +
                            std::to_string(p.dim()) + ")");
  }
}

// |u|^kappa with the kappa == 2 case kept exact.
double kpow(double u, double kappa) { return kappa == 2.0 ? u * u : std::pow(std::abs(u), kappa); }

void planar_rhs(const NeutralParams& p, const Vec& s, Vec& out) {
  const auto& c = p.coeffs();
  const double x = s[0], y = s[1];
  const double xk = kpow(x, p.kappa()), yk = kpow(y, p.kappa());
  out.resize(2);
  out[0] = x * (c.a0 * xk + c.a2 * yk);
  out[1] = -y * (c.b0 * xk + c.b2 * yk);
  if (const auto& h = p.higher_order()) {
    out[0] += eval_poly(h->dx, x, y, 0.0);
    out[1] += eval_poly(h->dy, x, y, 0.0);
  }
}

void spatial_rhs(const NeutralParams& p, const Vec& s, Vec& out) {
  const auto& c = p.coeffs();
  const double x = s[0], y = s[1], z = s[2];
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  out.resize(3);
  out[0] = x * (c.a0 * x2 + c.a1 * y2 + c.a2 * z2);
  out[1] = -c.ell * y * (1.0 + c.c0 * x2 + c.c2 * z2);
  out[2] = -z * (c.b0 * x2 + c.b1 * y2 + c.b2 * z2);
  if (const auto& h = p.higher_order()) {
    out[0] += eval_poly(h->dx, x, y, z);
    out[1] += eval_poly(h->dy, x, y, z);
    out[2] += eval_poly(h->dz, x, y, z);
  }
}

void planar_jacobian(const NeutralParams& p, const Vec& s, Mat& j) {
  const auto& c = p.coeffs();
  const double x = s[0], y = s[1], k = p.kappa();
  j.setZero(2, 2);
  if (k == 2.0) {
    j(0, 0) = 3.0 * c.a0 * x * x + c.a2 * y * y;
    j(0, 1) = 2.0 * c.a2 * x * y;
    j(1, 0) = -2.0 * c.b0 * x * y;
    j(1, 1) = -(c.b0 * x * x + 3.0 * c.b2 * y * y);
  } else {
    const double ax = std::abs(x), ay = std::abs(y);
    const double sx = x < 0 ? -1.0 : 1.0, sy = y < 0 ? -1.0 : 1.0;
    j(0, 0) = c.a0 * (k + 1.0) * std::pow(ax, k) + c.a2 * std::pow(ay, k);
    j(0, 1) = x * c.a2 * k * std::pow(ay, k - 1.0) * sy;
    j(1, 0) = -y * c.b0 * k * std::pow(ax, k - 1.0) * sx;
    j(1, 1) = -(c.b0 * std::pow(ax, k) + c.b2 * (k + 1.0) * std::pow(ay, k));
  }
  if (const auto& h = p.higher_order()) {
    for (int a = 0; a < 2; ++a) {
      j(0, a) += eval_poly_partial(h->dx, a, x, y, 0.0);
      j(1, a) += eval_poly_partial(h->dy, a, x, y, 0.0);
    }
  }
}

void spatial_jacobian(const NeutralParams& p, const Vec& s, Mat& j) {
  const auto& c = p.coeffs();
  const double x = s[0], y = s[1], z = s[2];
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  j.setZero(3, 3);
  j(0, 0) = 3.0 * c.a0 * x2 + c.a1 * y2 + c.a2 * z2;
  j(0, 1) = 2.0 * c.a1 * x * y;
  j(0, 2) = 2.0 * c.a2 * x * z;
  j(1, 0) = -2.0 * c.ell * c.c0 * x * y;
  j(1, 1) = -c.ell * (1.0 + c.c0 * x2 + c.c2 * z2);
  j(1, 2) = -2.0 * c.ell * c.c2 * y * z;
  j(2, 0) = -2.0 * c.b0 * x * z;
  j(2, 1) = -2.0 * c.b1 * y * z;
  j(2, 2) = -(c.b0 * x2 + c.b1 * y2 + 3.0 * c.b2 * z2);
  if (const auto& h = p.higher_order()) {
    for (int a = 0; a < 3; ++a) {
      j(0, a) += eval_poly_partial(h->dx, a, x, y, z);
      j(1, a) += eval_poly_partial(h->dy, a, x, y, z);
      j(2, a) += eval_poly_partial(h->dz, a, x, y, z);
    }
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ContractViolation(std::string("coefficient ") + name + " must be strictly positive and finite");
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ContractViolation(std::string("coefficient ") + name + " must be nonnegative and finite");
  }
}

// Largest value of coef * u^2 over u in [lo, hi].
double max_scaled_square(double coef, double lo, double hi) {
  if (coef > 0.0) return coef * std::max(lo * lo, hi * hi);
  const double min_sq = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);
  return coef * min_sq;
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::TwoD: return "2d";
    case Model::Model1: return "model1";
    case Model::Model2: return "model2";
    case Model::Model3: return "model3";
  }
  return "unknown";
}

Model model_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "2d" || lower == "twod") return Model::TwoD;
  if (lower == "model1") return Model::Model1;
  if (lower == "model2") return Model::Model2;
  if (lower == "model3") return Model::Model3;
  throw ContractViolation("unknown model '" + std::string(name) + "' (expected 2d, model1, model2, model3)");
}

int dimension(Model m) { return m == Model::TwoD ? 2 : 3; }

void Perturbation::validate(Model m) const {
  const bool planar = m == Model::TwoD;
  auto check = [](const std::vector<Monomial>& terms, const char* comp, int axis) {
    for (const auto& t : terms) {
      if (t.px < 0 || t.py < 0 || t.pz < 0) {
        throw ContractViolation(std::string("perturbation term in ") + comp + " has a negative power");
      }
      if (t.degree() < 4) {
        throw ContractViolation(std::string("perturbation term in ") + comp + " has degree below 4");
      }
      const int p[3] = {t.px, t.py, t.pz};
      if (axis >= 0 && p[axis] < 2) {
        throw ContractViolation(std::string("perturbation component ") + comp +
                                " must be divisible by the square of its own coordinate");
      }
    }
  };
  check(dx, "dx", 0);
  if (planar) {
    if (!dz.empty()) throw ContractViolation("planar model takes no dz perturbation");
    for (const auto& t : dx) {
      if (t.pz != 0) throw ContractViolation("planar perturbation may not depend on z");
    }
    for (const auto& t : dy) {
      if (t.pz != 0) throw ContractViolation("planar perturbation may not depend on z");
    }
    check(dy, "dy", 1);
  } else {
    check(dy, "dy", -1);
    check(dz, "dz", 2);
  }
}

NeutralParams::NeutralParams(Model model, Coefficients c, std::optional<Perturbation> higher_order,
                             double kappa)
    : model_(model), coeffs_(c), higher_order_(std::move(higher_order)), kappa_(kappa) {
  switch (model_) {
    case Model::TwoD:
      coeffs_.a1 = coeffs_.b1 = coeffs_.c0 = coeffs_.c2 = 0.0;
      break;
    case Model::Model1:
      coeffs_.c0 = coeffs_.c2 = 0.0;
      break;
    case Model::Model2:
      coeffs_.a1 = coeffs_.b1 = 0.0;
      break;
    case Model::Model3:
      break;
  }
  require_positive(coeffs_.a0, "a0");
  require_positive(coeffs_.a2, "a2");
  require_positive(coeffs_.b0, "b0");
  require_positive(coeffs_.b2, "b2");
  if (model_ == Model::Model1 || model_ == Model::Model3) {
    require_positive(coeffs_.a1, "a1");
    require_positive(coeffs_.b1, "b1");
  }
  require_nonnegative(coeffs_.c0, "c0");
  require_nonnegative(coeffs_.c2, "c2");
  if (model_ != Model::TwoD) require_positive(coeffs_.ell, "ell");
  if (delta() == 0.0) throw ContractViolation("Delta = a2*b0 - a0*b2 must be nonzero");
  if (!(kappa_ > 0.0)) throw ContractViolation("kappa must be positive");
  if (kappa_ != 2.0 && model_ != Model::TwoD) {
    throw ContractViolation("kappa other than 2 is only available for the planar model");
  }
  if (higher_order_) {
    higher_order_->validate(model_);
    if (higher_order_->empty()) higher_order_.reset();
  }
}

DerivedExponents derived_exponents(const NeutralParams& p) {
  const auto& c = p.coeffs();
  DerivedExponents e;
  e.beta0 = (c.a0 + c.b0) / (2.0 * c.a0);
  e.beta2 = (c.a2 + c.b2) / (2.0 * c.b2);
  e.beta = e.beta0 / e.beta2;
  return e;
}

Vec make_state(double x, double y) {
  Vec s(2);
  s << x, y;
  return s;
}

Vec make_state(double x, double y, double z) {
  Vec s(3);
  s << x, y, z;
  return s;
}

Vec eval_field(const NeutralParams& p, const Vec& s) {
  require_dim(p, s);
  Vec out;
  if (p.model() == Model::TwoD) {
    planar_rhs(p, s, out);
  } else {
    spatial_rhs(p, s, out);
  }
  return out;
}

Mat field_jacobian(const NeutralParams& p, const Vec& s) {
  require_dim(p, s);
  Mat j;
  if (p.model() == Model::TwoD) {
    planar_jacobian(p, s, j);
  } else {
    spatial_jacobian(p, s, j);
  }
  return j;
}

double divergence(const NeutralParams& p, const Vec& s) {
  require_dim(p, s);
  if (p.higher_order() || p.kappa() != 2.0) return field_jacobian(p, s).trace();
  const auto& c = p.coeffs();
  const double x2 = s[0] * s[0], y2 = s[1] * s[1];
  if (p.model() == Model::TwoD) return (3.0 * c.a0 - c.b0) * x2 + (c.a2 - 3.0 * c.b2) * y2;
  const double z2 = s[2] * s[2];
  return (3.0 * c.a0 - c.b0 - c.ell * c.c0) * x2 + (c.a1 - c.b1) * y2 +
         (c.a2 - 3.0 * c.b2 - c.ell * c.c2) * z2 - c.ell;
}

DissipativityReport check_dissipativity(const NeutralParams& p, const Box& box) {
  const int d = p.dim();
  for (int k = 0; k < d; ++k) {
    if (!(box.lo[k] <= box.hi[k]) || !std::isfinite(box.lo[k]) || !std::isfinite(box.hi[k])) {
      throw ContractViolation("dissipativity box is empty or unbounded");
    }
  }

  double sup = -std::numeric_limits<double>::infinity();
  if (!p.higher_order() && p.kappa() == 2.0) {
    const auto& c = p.coeffs();
    if (p.model() == Model::TwoD) {
      sup = max_scaled_square(3.0 * c.a0 - c.b0, box.lo[0], box.hi[0]) +
            max_scaled_square(c.a2 - 3.0 * c.b2, box.lo[1], box.hi[1]);
    } else {
      sup = max_scaled_square(3.0 * c.a0 - c.b0 - c.ell * c.c0, box.lo[0], box.hi[0]) +
            max_scaled_square(c.a1 - c.b1, box.lo[1], box.hi[1]) +
            max_scaled_square(c.a2 - 3.0 * c.b2 - c.ell * c.c2, box.lo[2], box.hi[2]) - c.ell;
    }
  } else {
    constexpr int kGrid = 41;
    auto node = [&](int axis, int i) {
      return box.lo[axis] + (box.hi[axis] - box.lo[axis]) * static_cast<double>(i) / (kGrid - 1);
    };
    const int nz = d == 3 ? kGrid : 1;
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        for (int k = 0; k < nz; ++k) {
          const Vec s = d == 3 ? make_state(node(0, i), node(1, j), node(2, k))
                               : make_state(node(0, i), node(1, j));
          sup = std::max(sup, divergence(p, s));
        }
      }
    }
  }
  return {sup < 0.0, -sup};
}

LinearLorenzParams::LinearLorenzParams(double lambda_u, double lambda_s, double lambda_ss)
    : lambda_u_(lambda_u), lambda_s_(lambda_s), lambda_ss_(lambda_ss) {
  if (!(lambda_s_ > 0.0 && lambda_s_ < lambda_u_ && lambda_u_ < lambda_ss_) || !std::isfinite(lambda_ss_)) {
    throw ContractViolation("linear Lorenz eigenvalues must satisfy 0 < lambda_s < lambda_u < lambda_ss");
  }
}

Vec eval_linear_field(const LinearLorenzParams& p, const Vec& s) {
  if (s.size() != 3) throw ContractViolation("linear Lorenz field needs a 3-D state");
  return make_state(p.lambda_u() * s[0], -p.lambda_s() * s[1], -p.lambda_ss() * s[2]);
}

OdeSystem neutral_system(const NeutralParams& p, bool with_quadrature) {
  if (with_quadrature && p.model() == Model::TwoD) {
    throw ContractViolation("the quadrature channel is only defined for 3-D models");
  }
  OdeSystem sys;
  const int base = p.dim();
  sys.dim = base + (with_quadrature ? 1 : 0);
  if (p.model() == Model::TwoD) {
    sys.rhs = [p](const Vec& s, Vec& out) { planar_rhs(p, s, out); };
    sys.jacobian = [p](const Vec& s, Mat& j) { planar_jacobian(p, s, j); };
  } else if (!with_quadrature) {
    sys.rhs = [p](const Vec& s, Vec& out) { spatial_rhs(p, s, out); };
    sys.jacobian = [p](const Vec& s, Mat& j) { spatial_jacobian(p, s, j); };
  } else {
    sys.rhs = [p](const Vec& s, Vec& out) {
      Vec head;
      spatial_rhs(p, s.head(3), head);
      const auto& c = p.coeffs();
      out.resize(4);
      out.head(3) = head;
      out[3] = c.c0 * s[0] * s[0] + c.c2 * s[2] * s[2];
    };
    sys.jacobian = [p](const Vec& s, Mat& j) {
      Mat head;
      spatial_jacobian(p, s.head(3), head);
      const auto& c = p.coeffs();
      j.setZero(4, 4);
      j.topLeftCorner(3, 3) = head;
      j(3, 0) = 2.0 * c.c0 * s[0];
      j(3, 2) = 2.0 * c.c2 * s[2];
    };
  }
  return sys;
}

OdeSystem linear_system(const LinearLorenzParams& p) {
  OdeSystem sys;
  sys.dim = 3;
  sys.rhs = [p](const Vec& s, Vec& out) { out = eval_linear_field(p, s); };
  sys.jacobian = [p](const Vec&, Mat& j) {
    j.setZero(3, 3);
    j(0, 0) = p.lambda_u();
    j(1, 1) = -p.lambda_s();
    j(2, 2) = -p.lambda_ss();
  };
  return sys;
}

}  // namespace nlab
