#pragma once

// Local vector fields near the neutral saddle, the linear Lorenz baseline and the
// exponents derived from the cubic coefficients.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "nlab/linalg.hpp"
#include "nlab/system.hpp"

namespace nlab {

enum class Model {
  TwoD,    ///< planar normal form  (x(a0 x^k + a2 y^k), -y(b0 x^k + b2 y^k))
  Model1,  ///< c0 = c2 = 0, y decouples as y0 exp(-ell t)
  Model2,  ///< a1 = b1 = 0, (x, z) decouple from y
  Model3,  ///< all coefficients active
};

std::string_view to_string(Model m);
/// Accepts "2d", "model1", "model2", "model3" (case-insensitive). Throws ContractViolation.
Model model_from_string(std::string_view name);
int dimension(Model m);

/// One term  coeff * x^px * y^py * z^pz  of a higher-order perturbation.
struct Monomial {
  double coeff = 0.0;
  int px = 0;
  int py = 0;
  int pz = 0;

  int degree() const { return px + py + pz; }
};

/// Polynomial O(4) perturbation added to the cubic field, one list per component.
/// For the planar model only dx and dy are used.
struct Perturbation {
  std::vector<Monomial> dx, dy, dz;

  /// Every term has degree >= 4, the x-component is divisible by x^2 and the
  /// stable component (z in 3-D, y in 2-D) by its coordinate squared.
  void validate(Model m) const;
  bool empty() const { return dx.empty() && dy.empty() && dz.empty(); }
};

struct Coefficients {
  double a0 = 1.0, a1 = 0.0, a2 = 1.0;
  double b0 = 1.0, b1 = 0.0, b2 = 1.0;
  double c0 = 0.0, c2 = 0.0;
  double ell = 1.0;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

/// Validated parameter set of the neutral system. Construction enforces positivity,
/// Delta = a2 b0 - a0 b2 != 0 and the model-specific zero pattern (Model1 zeroes c0, c2;
/// Model2 zeroes a1, b1; TwoD zeroes a1, b1, c0, c2).
class NeutralParams {
 public:
  NeutralParams(Model model, Coefficients coeffs, std::optional<Perturbation> higher_order = {},
                double kappa = 2.0);

  Model model() const { return model_; }
  const Coefficients& coeffs() const { return coeffs_; }
  const std::optional<Perturbation>& higher_order() const { return higher_order_; }
  /// Exponent of the planar normal form; 2 everywhere except as an explicit knob.
  double kappa() const { return kappa_; }
  int dim() const { return dimension(model_); }
  double delta() const { return coeffs_.a2 * coeffs_.b0 - coeffs_.a0 * coeffs_.b2; }

 private:
  Model model_;
  Coefficients coeffs_;
  std::optional<Perturbation> higher_order_;
  double kappa_;
};

struct DerivedExponents {
  double beta0 = 0.0;  ///< (a0 + b0) / (2 a0)
  double beta2 = 0.0;  ///< (a2 + b2) / (2 b2)
  double beta = 0.0;   ///< beta0 / beta2
};

DerivedExponents derived_exponents(const NeutralParams& p);

Vec make_state(double x, double y);
Vec make_state(double x, double y, double z);

/// Right-hand side of the selected model. Throws ContractViolation on dimension mismatch.
Vec eval_field(const NeutralParams& p, const Vec& s);
/// Exact Jacobian of eval_field.
Mat field_jacobian(const NeutralParams& p, const Vec& s);
double divergence(const NeutralParams& p, const Vec& s);

/// Axis-aligned region; only the first `dim` intervals are used.
struct Box {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  static Box cube(double half_width) {
    return {{-half_width, -half_width, -half_width}, {half_width, half_width, half_width}};
  }
};

struct DissipativityReport {
  bool ok = false;
  double min_margin = 0.0;  ///< -sup(div) over the box
};

/// ok iff sup of the divergence over the box is strictly negative.
/// Exact for the unperturbed field (the quadratic part is separable); a 41-point
/// per-axis grid search otherwise.
DissipativityReport check_dissipativity(const NeutralParams& p, const Box& box);

/// Eigenvalue magnitudes of the linearised Lorenz saddle; 0 < s < u < ss.
class LinearLorenzParams {
 public:
  LinearLorenzParams(double lambda_u, double lambda_s, double lambda_ss);

  double lambda_u() const { return lambda_u_; }
  double lambda_s() const { return lambda_s_; }
  double lambda_ss() const { return lambda_ss_; }

 private:
  double lambda_u_, lambda_s_, lambda_ss_;
};

/// (lambda_u x, -lambda_s y, -lambda_ss z)
Vec eval_linear_field(const LinearLorenzParams& p, const Vec& s);

/// ODE adaptor for the neutral field. With `with_quadrature` a fourth channel
/// q' = c0 x^2 + c2 z^2 is appended (3-D models only).
OdeSystem neutral_system(const NeutralParams& p, bool with_quadrature = false);
OdeSystem linear_system(const LinearLorenzParams& p);

}  // namespace nlab
