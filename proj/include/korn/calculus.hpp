#pragma once

#include <vector>

#include <Eigen/Dense>

#include "korn/measure.hpp"
#include "korn/polynomial.hpp"

namespace korn {

/// Vector field with polynomial coordinates u = (u_1, ..., u_d).
class PolyVectorField {
 public:
  explicit PolyVectorField(int dim = 1);
  explicit PolyVectorField(std::vector<Polynomial> components);

  static PolyVectorField constant(const Eigen::VectorXd& b);
  /// x -> A x + b.
  static PolyVectorField affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
  static PolyVectorField linear(const Eigen::MatrixXd& a);

  int dimension() const noexcept { return static_cast<int>(comps_.size()); }
  int degree() const;
  const Polynomial& operator[](int i) const { return comps_.at(i); }
  Polynomial& operator[](int i) { return comps_.at(i); }
  const std::vector<Polynomial>& components() const noexcept { return comps_; }

  PolyVectorField& operator+=(const PolyVectorField& o);
  PolyVectorField& operator-=(const PolyVectorField& o);
  PolyVectorField& operator*=(double s);
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(PolyVectorField a, double s) { return a *= s; }
  friend PolyVectorField operator*(double s, PolyVectorField a) { return a *= s; }

 private:
  std::vector<Polynomial> comps_;
};

enum class Symmetry { none, symmetric, antisymmetric };

/// d x d matrix of polynomials, row-major.
class PolyMatrixField {
 public:
  explicit PolyMatrixField(int dim = 1, Symmetry symmetry = Symmetry::none);

  static PolyMatrixField constant(const Eigen::MatrixXd& a);

  int dimension() const noexcept { return dim_; }
  Symmetry symmetry() const noexcept { return symmetry_; }
  const Polynomial& operator()(int i, int j) const { return entries_.at(i * dim_ + j); }
  Polynomial& operator()(int i, int j) { return entries_.at(i * dim_ + j); }

  /// Entries agree with the tag coefficientwise within tol.
  bool symmetry_consistent(double tol = 1e-12) const;
  /// Largest coefficient magnitude over all entries.
  double max_abs_coefficient() const;

  PolyMatrixField operator+(const PolyMatrixField& o) const;
  PolyMatrixField operator-(const PolyMatrixField& o) const;

 private:
  int dim_;
  Symmetry symmetry_;
  std::vector<Polynomial> entries_;
};

struct Differential {
  PolyMatrixField full;     // (Du)_ij = d_j u_i
  PolyMatrixField sym;      // (D^s u)_ij = (d_j u_i + d_i u_j) / 2
  PolyMatrixField antisym;  // (D^a u)_ij = (d_j u_i - d_i u_j) / 2
};

Differential differentiate(const PolyVectorField& u);

Polynomial divergence(const PolyVectorField& u);

/// Weight applied inside weighted_inner: 1, sqrt(1 + |grad phi|^2) or 1 + |grad phi|^2.
enum class Weight { one, gradphi, gradphi_sq };

/// Values of p at every quadrature node.
Eigen::VectorXd node_values(const Polynomial& p, const Quadrature& q);

/// Nodal values of sqrt(1+|grad phi|^2) raised to the power implied by w.
Eigen::VectorXd weight_values(const Quadrature& q, Weight w);

double weighted_inner(const Polynomial& a, const Polynomial& b, const Quadrature& q, Weight w = Weight::one);
double weighted_inner(const PolyVectorField& a, const PolyVectorField& b, const Quadrature& q,
                      Weight w = Weight::one);
double weighted_inner(const PolyMatrixField& a, const PolyMatrixField& b, const Quadrature& q,
                      Weight w = Weight::one);

/// <u> componentwise.
Eigen::VectorXd mean(const PolyVectorField& u, const Quadrature& q);
/// <F> entrywise.
Eigen::MatrixXd mean(const PolyMatrixField& f, const Quadrature& q);

/// grad phi . u at every node.
Eigen::VectorXd gradphi_dot_values(const PolyVectorField& u, const Quadrature& q);

/// div u - grad phi . u as a polynomial; throws when phi is not polynomial.
Polynomial phi_divergence(const PolyVectorField& u, const Potential& p);
/// div u - grad phi . u at every node, for any potential.
Eigen::VectorXd phi_divergence_values(const PolyVectorField& u, const Quadrature& q);

/// Entry (i, j, k) at index (i*d + j)*d + k:
/// d_k (D^a u)_ij - d_j (D^s u)_ik + d_i (D^s u)_jk.
std::vector<Polynomial> schwarz_residual(const PolyVectorField& u);
/// True when every entry has all coefficients within tol of zero.
bool schwarz_vanishes(const std::vector<Polynomial>& residual, double tol = 1e-12);

/// Terms of the two first-order identities for a field u:
///   |D^a u|^2 + |div_phi u|^2 = |D^s u|^2 + <D^2 phi : u (x) u>
///   |Du|^2 <= 2 |D^s u|^2 + <D^2 phi : u (x) u>
struct IdentityTerms {
  double full = 0.0;       // ||Du||^2
  double sym = 0.0;        // ||D^s u||^2
  double antisym = 0.0;    // ||D^a u||^2
  double phi_div = 0.0;    // ||div_phi u||^2
  double hess_form = 0.0;  // <D^2 phi : u (x) u>

  double first_lhs() const { return antisym + phi_div; }
  double first_rhs() const { return sym + hess_form; }
  double second_lhs() const { return full; }
  double second_rhs() const { return 2.0 * sym + hess_form; }
};

IdentityTerms identity_terms(const PolyVectorField& u, const Quadrature& q);

/// Field whose coordinates have every monomial of degree <= max_degree, with
/// coefficients from `rng`.
PolyVectorField random_field(int dim, int max_degree, CoefficientStream& rng);

}  // namespace korn
