#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace korn {

/// Exponent vector of a monomial x_1^{e_1} ... x_d^{e_d}.
using Multiindex = std::vector<int>;

int total_degree(const Multiindex& m);

/// All multiindices in `dim` variables of total degree <= `max_degree`, in
/// graded lexicographic order (degree first, then descending in x_1).
std::vector<Multiindex> graded_monomials(int dim, int max_degree);

/// Sparse multivariate polynomial with double coefficients. Zero coefficients
/// are never stored, so an empty term map is the zero polynomial.
class Polynomial {
 public:
  using TermMap = std::map<Multiindex, double>;

  explicit Polynomial(int dim = 1);

  static Polynomial constant(int dim, double value);
  static Polynomial monomial(const Multiindex& exponents, double coefficient = 1.0);
  /// The coordinate function x_i.
  static Polynomial coordinate(int dim, int i);

  int dimension() const noexcept { return dim_; }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }
  const TermMap& terms() const noexcept { return terms_; }

  double coefficient(const Multiindex& m) const;
  void add_term(const Multiindex& m, double coefficient);

  double max_abs_coefficient() const;
  /// Copy with every coefficient of magnitude <= tol removed.
  Polynomial pruned(double tol) const;

  Polynomial derivative(int i) const;
  /// x -> p(x + shift), expanded back into monomials.
  Polynomial translated(std::span<const double> shift) const;

  double operator()(std::span<const double> x) const;
  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial operator-() const { return *this * -1.0; }

  std::string to_string() const;

 private:
  int dim_;
  TermMap terms_;
};

using PolyScalarField = Polynomial;

/// Evaluates polynomials at a fixed set of points through cached power tables,
/// one column per point so evaluation is a sequence of vector products.
class NodeEvaluator {
 public:
  /// `points` is dim x n (one column per node).
  NodeEvaluator(const Eigen::MatrixXd& points, int max_degree);

  int dimension() const noexcept { return dim_; }
  int max_degree() const noexcept { return max_degree_; }
  Eigen::Index size() const noexcept { return n_; }

  Eigen::VectorXd evaluate(const Polynomial& p) const;
  /// Values of x^m at every node.
  Eigen::VectorXd monomial(const Multiindex& m) const;

 private:
  int dim_;
  int max_degree_;
  Eigen::Index n_;
  // powers_[i] is (max_degree+1) x n with row e holding x_i^e.
  std::vector<Eigen::MatrixXd> powers_;
};

/// Seeded generator of coefficients uniform in [-1, 1]; uses its own mapping
/// from 64-bit words so streams are identical across standard libraries.
class CoefficientStream {
 public:
  explicit CoefficientStream(std::uint64_t seed);
  double next();
  std::uint64_t next_word();

 private:
  std::uint64_t state_;
};

/// Polynomial with every monomial of degree <= max_degree and coefficients
/// drawn from `rng`.
Polynomial random_polynomial(int dim, int max_degree, CoefficientStream& rng);

}  // namespace korn
