#pragma once

#include <memory>

#include <Eigen/Dense>

#include "korn/calculus.hpp"
#include "korn/measure.hpp"
#include "korn/polynomial.hpp"

namespace korn {

/// Relative density h(x, v) against M = e^{-phi(x)} mu(v), mu the standard
/// Gaussian. Variables are x_1..x_d followed by v_1..v_d.
struct PhaseField {
  int dimension = 0;
  Polynomial h{2};

  PhaseField() = default;
  PhaseField(int d, Polynomial poly);

  static Polynomial x(int d, int i) { return Polynomial::coordinate(2 * d, i); }
  static Polynomial v(int d, int i) { return Polynomial::coordinate(2 * d, d + i); }
  /// Lifts a polynomial in x alone into phase space.
  static Polynomial lift_x(const Polynomial& p);
};

/// x-rule crossed with a standard Gauss-Hermite rule in v.
struct PhaseQuadrature {
  int dimension = 0;
  Eigen::MatrixXd nodes;      // 2d x n
  Eigen::VectorXd weights;    // n
  Eigen::MatrixXd gradients;  // d x n, grad phi at the x part
  /// Power tables shared by every evaluation up to max_degree.
  std::shared_ptr<const NodeEvaluator> evaluator;

  Eigen::Index size() const noexcept { return weights.size(); }
  double integrate(const Eigen::VectorXd& values) const { return weights.dot(values); }
};

/// v_order Gauss-Hermite points per velocity axis; polynomials of degree up
/// to max_degree evaluate through cached power tables.
PhaseQuadrature build_phase_quadrature(const Quadrature& xrule, int v_order, int max_degree = 8);

/// Pi h = r(x) + u(x) . v with r = int h mu dv and u = int v h mu dv, computed
/// from exact Gaussian moments.
PhaseField collision_project(const PhaseField& h);
/// L(h) = Pi h - h.
PhaseField collision_operator(const PhaseField& h);

Eigen::VectorXd phase_values(const PhaseField& h, const PhaseQuadrature& q);
double phase_inner(const PhaseField& a, const PhaseField& b, const PhaseQuadrature& q);

/// || v . grad_x h - grad phi . grad_v h - L(h) || in L2(M).
double transport_residual(const PhaseField& h, const PhaseQuadrature& q);

/// Residual for h = R(x) . v + c.
double stationary_residual(const PolyVectorField& r, double c, const PhaseQuadrature& q);

struct DissipationIdentity {
  double lhs = 0.0;  // 2 <<L(h), h>>
  double rhs = 0.0;  // -2 ||h - Pi h||^2
};
DissipationIdentity dissipation_identity(const PhaseField& h, const PhaseQuadrature& q);

/// <<L(h), 1>> followed by <<L(h), v_i>>; all vanish.
Eigen::VectorXd collision_invariants(const PhaseField& h, const PhaseQuadrature& q);

/// Phase polynomial of total degree <= max_degree with seeded coefficients.
PhaseField random_phase_field(int d, int max_degree, CoefficientStream& rng);

}  // namespace korn
