#pragma once

#include <Eigen/Dense>

#include "korn/measure.hpp"
#include "korn/projections.hpp"
#include "korn/witten.hpp"

namespace korn {

/// One rigidity constant C = 1 / min (numerator / denominator) over a finite
/// parametrized family, or 0 when the family is empty.
struct RigidityResult {
  double constant = 0.0;
  /// min of the quotient; 0 when the family is empty.
  double inverse = 0.0;
  bool empty = true;
  /// Minimizer coefficients in the parametrization (rotation or matrix part first, then b).
  Eigen::VectorXd minimizer;
  /// Minimizer as an affine map x -> A x + b.
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd numerator;
  Eigen::MatrixXd denominator;
};

struct RigidityReport {
  RigidityResult rv;
  RigidityResult rd;
  RigidityResult rv0;
  RigidityResult rvl;
};

/// Smallest eigenpair of numerator v = lambda denominator v via Cholesky.
/// Throws when the denominator is not positive definite.
std::pair<double, Eigen::VectorXd> smallest_pencil_eigenpair(const Eigen::MatrixXd& numerator,
                                                             const Eigen::MatrixXd& denominator);

/// Over A x + b in R_phi^c (+) R^d, denominator ||A x + b||^2.
RigidityResult rigidity_RV(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp);
/// Over (A, b) in M_phi^c x R^d, denominator |A|^2 + |b|^2.
RigidityResult rigidity_RD(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp);
/// As rigidity_RV with numerator ||Lambda^{-1/2} grad phi . (A x + b)||^2 in the Galerkin span.
/// Throws when grad phi . (A x + b) is not represented by the basis.
RigidityResult rigidity_RV0(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp,
                            const GalerkinBasis& basis, const OperatorMatrix& lambda);
/// Over A x in R_phi^c alone.
RigidityResult rigidity_RVL(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp);

RigidityReport rigidity_report(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp,
                               const GalerkinBasis& basis, const OperatorMatrix& lambda);

}  // namespace korn
