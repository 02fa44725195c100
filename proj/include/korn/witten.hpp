#pragma once

#include <vector>

#include <Eigen/Dense>

#include "korn/calculus.hpp"
#include "korn/measure.hpp"

namespace korn {

/// Polynomials of degree <= N, orthonormal in weighted L2, constants first.
/// Vector modes are f_a e_i, stored component-major at index i * size() + a.
struct GalerkinBasis {
  int dimension = 0;
  int degree = 0;
  std::vector<Multiindex> monomials;
  std::vector<Polynomial> modes;
  /// Mode values at the quadrature nodes, nodes x modes.
  Eigen::MatrixXd values;
  /// derivatives[i](b, a) is the coefficient of f_b in d_i f_a.
  std::vector<Eigen::MatrixXd> derivatives;
  /// max |<f_a f_b> - delta_ab| measured on the rule.
  double orthonormality_residual = 0.0;

  int size() const noexcept { return static_cast<int>(modes.size()); }
  int vector_size() const noexcept { return dimension * size(); }

  /// Values of d_i f_a at every node, nodes x modes.
  Eigen::MatrixXd derivative_values(int i) const { return values * derivatives.at(i); }
  /// <h f_a> for nodal values h.
  Eigen::VectorXd project(const Eigen::VectorXd& nodal, const Quadrature& q) const;
  /// Coefficients of a polynomial of degree <= N in the modes.
  Eigen::VectorXd coefficients(const Polynomial& p, const Quadrature& q) const;
  /// Coefficients of a vector field, component-major.
  Eigen::VectorXd coefficients(const PolyVectorField& u, const Quadrature& q) const;
  /// Relative weighted-L2 distance of nodal values h from the span.
  double span_residual(const Eigen::VectorXd& nodal, const Quadrature& q) const;
};

/// Number of monomials in d variables of degree <= k.
int monomial_count(int d, int k);

/// Modified Gram-Schmidt (two passes) on graded monomials in the coordinates
/// rescaled by the rule's standard deviations.
GalerkinBasis build_basis(const Potential& p, const Quadrature& q, int degree);

enum class OperatorTag { lambda_scalar, lambda_vector, deltaS, deltaSphi };
const char* to_string(OperatorTag tag);

/// Dense symmetric Galerkin matrix with its eigendecomposition.
struct OperatorMatrix {
  OperatorTag tag = OperatorTag::lambda_scalar;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;
  /// For lambda matrices: max difference between the quadrature assembly and
  /// the exact-derivative form I + sum_i T_i^T T_i.
  double assembly_discrepancy = 0.0;

  bool is_lambda() const noexcept { return tag == OperatorTag::lambda_scalar || tag == OperatorTag::lambda_vector; }
  /// Eigenvalues of the underlying nonnegative operator (-Delta_phi for Lambda).
  Eigen::VectorXd spectrum() const;
  int kernel_dimension(double threshold = 1e-8) const;
};

/// Symmetrizes, checks symmetry to 1e-10 and decomposes.
OperatorMatrix make_operator(OperatorTag tag, const Eigen::MatrixXd& m);

/// Lambda = -Delta_phi + Id on the scalar modes.
OperatorMatrix assemble_lambda(const GalerkinBasis& basis, const Quadrature& q);
/// Lambda acting coordinate by coordinate on vector modes.
OperatorMatrix assemble_lambda_vector(const GalerkinBasis& basis, const Quadrature& q);

/// <D^s u_a : D^s u_b>, plus <(grad phi . u_a)(grad phi . u_b)> for deltaSphi.
OperatorMatrix assemble_vector_operator(const GalerkinBasis& basis, const Quadrature& q, OperatorTag which);

struct SpectralGap {
  double gap = 0.0;
  /// 1 / gap. Galerkin gaps over-estimate the true gap, so this bounds C_P from below.
  double c_p_estimate = 0.0;
  int kernel_dimension = 0;
};

/// Gap of -Delta_phi. With exclude_degree = k >= 0 the problem is restricted
/// to modes orthogonal to all polynomials of degree <= k.
SpectralGap spectral_gap(const OperatorMatrix& lambda, const GalerkinBasis& basis, int exclude_degree = -1,
                         double threshold = 1e-8);

/// V diag(lambda^sigma) V^T applied to coeffs.
Eigen::VectorXd lambda_power_apply(const OperatorMatrix& lambda, double sigma, const Eigen::VectorXd& coeffs);
Eigen::MatrixXd lambda_power(const OperatorMatrix& lambda, double sigma);

/// Galerkin estimate of ||Lambda^{-1/2} h||^2 from the coefficients c_a = <h f_a>.
double dual_norm_sq(const OperatorMatrix& lambda, const Eigen::VectorXd& coeffs);

}  // namespace korn
