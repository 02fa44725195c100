#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "korn/calculus.hpp"
#include "korn/measure.hpp"

namespace korn {

/// Weighted-L2 orthonormal basis of the infinitesimal rotations x -> A x.
struct RotationBasis {
  int dimension = 0;
  /// Generator index pairs (i, j), i < j, of A_ij with (A_ij x)_i = -x_j, (A_ij x)_j = x_i.
  std::vector<std::pair<int, int>> pairs;
  /// Z_ij = <x_i^2 + x_j^2>^{1/2}.
  std::vector<double> normalization;
  /// Matrices M_r of the orthonormal fields R_r(x) = M_r x.
  std::vector<Eigen::MatrixXd> matrices;
  /// True when the normalized generators were not already orthogonal and a
  /// Gram-Schmidt pass changed them.
  bool gram_schmidt_applied = false;
  /// Covariance <x x^T> used for the weighted inner products.
  Eigen::MatrixXd covariance;

  int size() const noexcept { return static_cast<int>(matrices.size()); }
  PolyVectorField field(int r) const { return PolyVectorField::linear(matrices.at(r)); }
};

/// Weighted-L2 inner product <Ax . Bx> = tr(A^T B Sigma) of two linear fields.
double linear_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& covariance);

/// The antisymmetric generator A_ij.
Eigen::MatrixXd rotation_generator(int d, int i, int j);

RotationBasis rotation_basis(const Quadrature& q, int d);

struct FieldProjection {
  PolyVectorField field;
  /// Coefficients against the orthonormal fields the projection targets.
  Eigen::VectorXd coefficients;
};

/// P(u): weighted-L2 projection onto the rotations.
FieldProjection project_R(const PolyVectorField& u, const RotationBasis& rb, const Quadrature& q);

/// <F^a>, the projection of a matrix field onto constant antisymmetric matrices.
Eigen::MatrixXd project_Ma(const PolyMatrixField& f, const Quadrature& q);

struct PhiDecomposition {
  /// Orthonormal (weighted L2) matrices spanning R_phi and its complement in R.
  std::vector<Eigen::MatrixXd> r_phi;
  std::vector<Eigen::MatrixXd> r_phi_c;
  /// Frobenius-orthonormal matrices spanning M_phi = D R_phi and its complement in M^a.
  std::vector<Eigen::MatrixXd> m_phi;
  std::vector<Eigen::MatrixXd> m_phi_c;
  /// Eigenvalues of G_rs = <(grad phi . R_r)(grad phi . R_s)>, ascending.
  Eigen::VectorXd gram_eigenvalues;
  /// Singular values of R -> grad phi . R, i.e. square roots of the Gram eigenvalues.
  Eigen::VectorXd symmetry_singular_values;
  double tolerance = 1e-8;
  /// Eigenvalues below this count as kernel.
  double threshold = 0.0;
  /// Smallest non-kernel eigenvalue over the threshold (infinite when none).
  double gap_ratio = 0.0;
  bool ill_conditioned = false;
  std::string warning;
};

inline constexpr double kNullspaceTolerance = 1e-8;

/// Splits R into R_phi (rotations with grad phi . R = 0) and its complement.
/// An eigenvalue counts as kernel when below tol^2 times
/// max_r <|grad phi|^2 |M_r x|^2>, the scale of G for the basis fields.
PhiDecomposition detect_Rphi(const Potential& p, const Quadrature& q, const RotationBasis& rb,
                             double tol = kNullspaceTolerance);

/// P_phi(u): weighted-L2 projection onto R_phi.
FieldProjection project_Rphi(const PolyVectorField& u, const PhiDecomposition& decomp, const Quadrature& q);

/// P_phi(F): Frobenius projection of <F> onto M_phi.
Eigen::MatrixXd project_Mphi(const PolyMatrixField& f, const PhiDecomposition& decomp, const Quadrature& q);
Eigen::MatrixXd project_Mphi(const Eigen::MatrixXd& a, const PhiDecomposition& decomp);

}  // namespace korn
