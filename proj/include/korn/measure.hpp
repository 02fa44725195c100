#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "korn/polynomial.hpp"

namespace korn {

enum class Family { gaussian, anisotropic_gaussian, quartic_radial, perturbed_gaussian, user_supplied };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Input to build_potential. Family parameters:
///   gaussian              []
///   anisotropic-gaussian  [s_1, ..., s_d]   variances, all > 0
///   quartic-radial        [alpha] or [alpha, gamma]  phi = alpha |x|^gamma + beta, gamma defaults to 4
///   perturbed-gaussian    [eps]             phi = |x|^2/2 + eps x_1^4 + beta
///   user-supplied         [] or per-axis envelope scales; `polynomial` holds phi up to a constant
struct PotentialSpec {
  Family family = Family::gaussian;
  std::vector<double> params;
  int dimension = 2;
  std::optional<Polynomial> polynomial;
  /// Tensor Gauss-Hermite order used to normalize and centre user-supplied potentials.
  int normalization_order = 24;
};

/// Confining potential phi with e^{-phi} dx a centred probability measure.
/// Immutable after construction.
class Potential {
 public:
  int dimension() const noexcept { return dim_; }
  Family family() const noexcept { return family_; }
  const std::vector<double>& params() const noexcept { return params_; }
  /// Constant added to the raw potential so the total mass is one.
  double offset() const noexcept { return offset_; }
  /// Translation applied to the raw potential so the mean is zero.
  const Eigen::VectorXd& center_shift() const noexcept { return shift_; }

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd hessian(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// phi as a polynomial (offset included) when it is one.
  const std::optional<Polynomial>& polynomial() const noexcept { return poly_; }
  /// Components of grad phi as polynomials when phi is polynomial.
  const std::vector<Polynomial>& gradient_polynomials() const noexcept { return grad_poly_; }
  /// Degree of grad phi, or -1 when phi is not polynomial.
  int gradient_degree() const;

  /// Per-axis scale of the Gaussian envelope used by the quadrature.
  const Eigen::VectorXd& envelope_scale() const noexcept { return envelope_; }
  /// True when e^{-phi} is exactly the (scaled) envelope, so Gauss-Hermite is exact.
  bool envelope_exact() const noexcept { return envelope_exact_; }
  /// Invariant under every rotation about the origin.
  bool radial() const noexcept { return radial_; }
  /// Covariance <x x^T> when known in closed form.
  const std::optional<Eigen::MatrixXd>& closed_form_covariance() const noexcept { return covariance_; }

 private:
  friend Potential build_potential(const PotentialSpec& spec);
  Potential() = default;

  int dim_ = 0;
  Family family_ = Family::gaussian;
  std::vector<double> params_;
  double offset_ = 0.0;
  Eigen::VectorXd shift_;
  std::optional<Polynomial> poly_;
  std::vector<Polynomial> grad_poly_;
  std::vector<std::vector<Polynomial>> hess_poly_;
  Eigen::VectorXd envelope_;
  bool envelope_exact_ = false;
  bool radial_ = false;
  std::optional<Eigen::MatrixXd> covariance_;
};

Potential build_potential(const PotentialSpec& spec);
Potential build_potential(Family family, std::vector<double> params, int dim);

/// Gauss-Hermite nodes and weights for the standard normal density, weights summing to 1.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermiteRule gauss_hermite(int order);

/// Limits on tensor-rule size: order^d may not exceed max_nodes.
struct QuadratureLimits {
  int max_dimension = 4;
  long max_nodes = 331776;  // 24^4
};

/// Positive-weight rule for integrals against e^{-phi} dx, with grad phi and
/// D^2 phi cached at every node.
struct Quadrature {
  int dimension = 0;
  int order = 0;
  /// Monomials of total degree <= this integrate exactly when `exact`.
  int exactness_degree = 0;
  bool exact = false;
  /// |sum of weights - 1| before renormalization.
  double mass_defect = 0.0;
  Eigen::MatrixXd nodes;     // d x n
  Eigen::VectorXd weights;   // n
  Eigen::MatrixXd gradients; // d x n, grad phi at each node
  Eigen::MatrixXd hessians;  // d*d x n, column-major D^2 phi at each node

  Eigen::Index size() const noexcept { return weights.size(); }
  double integrate(const Eigen::VectorXd& values) const { return weights.dot(values); }
  Eigen::Map<const Eigen::MatrixXd> hessian(Eigen::Index k) const {
    return Eigen::Map<const Eigen::MatrixXd>(hessians.col(k).data(), dimension, dimension);
  }
  /// Sample covariance <x x^T> under the rule.
  Eigen::MatrixXd covariance() const;
};

Quadrature build_quadrature(const Potential& p, int order, const QuadratureLimits& limits = {});

/// <x^m> under the rule; throws when |m| exceeds the exactness degree.
double moment(const Quadrature& q, const Multiindex& m);

enum class ConstantMethod { closed_form, node_supremum };

struct RegularityConstants {
  double c_phi = 0.0;
  double c_phi_prime = 0.0;
  /// C_eps of the regularity bound at eps = 1 / (2 sqrt(C_B)).
  double c_phi_second = 0.0;
  double epsilon = 0.0;
  double c_b = 0.0;
  ConstantMethod method = ConstantMethod::closed_form;
  bool certified = true;
  /// Supremum kept growing when the node set was stretched outward.
  bool growth_detected = false;
};

/// Degenerate d = 1 Gaussian case uses C_phi = 8 (1 + kStrictMargin).
inline constexpr double kStrictMargin = 1e-9;
inline constexpr double kSupremumSafety = 1.05;

RegularityConstants estimate_regularity_constants(const Potential& p, const Quadrature& q);

/// Constant of the D(Lambda) toolbox bound, from C_phi, C_phi' and d.
double domain_toolbox_constant(double c_phi, double c_phi_prime, int d);

/// Checks 4 sqrt(d) |D^2 phi| <= |grad phi|^2 + C_phi - 1 and
/// 4 |D^2 phi| <= C_phi^{-1/2} (|grad phi|^2 + C_phi').
bool regularity_inequalities_hold(const RegularityConstants& c, const Eigen::VectorXd& grad,
                                  const Eigen::MatrixXd& hess);

}  // namespace korn
