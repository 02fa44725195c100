#include "korn/rigidity.hpp"

#include <cmath>

#include "korn/error.hpp"

namespace korn {

std::pair<double, Eigen::VectorXd> smallest_pencil_eigenpair(const Eigen::MatrixXd& numerator,
                                                             const Eigen::MatrixXd& denominator) {
  Eigen::LLT<Eigen::MatrixXd> llt(denominator);
  if (llt.info() != Eigen::Success)
    throw Error("rigidity", "pencil", "denominator Gram is not positive definite",
                "the parametrizing map should be injective; check the decomposition");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd linv = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(l.rows(), l.cols()));
  const Eigen::MatrixXd reduced = linv * numerator * linv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (reduced + reduced.transpose()));
  const Eigen::VectorXd v = linv.transpose() * es.eigenvectors().col(0);
  return {es.eigenvalues()[0], v};
}

namespace {

// Affine family: e_k(x) = A_k x + b_k, listed as matrices plus translation vectors.
struct AffineFamily {
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::VectorXd> b;
  int size() const { return static_cast<int>(a.size()); }
};

AffineFamily affine_family(const std::vector<Eigen::MatrixXd>& mats, bool with_translations, int d) {
  AffineFamily f;
  for (const auto& m : mats) {
    f.a.push_back(m);
    f.b.push_back(Eigen::VectorXd::Zero(d));
  }
  if (with_translations)
    for (int i = 0; i < d; ++i) {
      f.a.push_back(Eigen::MatrixXd::Zero(d, d));
      f.b.push_back(Eigen::VectorXd::Unit(d, i));
    }
  return f;
}

// Nodal values of e_k (d x n per member) and grad phi . e_k (n x m).
Eigen::MatrixXd gradphi_values(const AffineFamily& f, const Quadrature& q) {
  Eigen::MatrixXd g(q.size(), f.size());
  for (int k = 0; k < f.size(); ++k) {
    const Eigen::MatrixXd e = (f.a[k] * q.nodes).colwise() + f.b[k];
    g.col(k) = q.gradients.cwiseProduct(e).colwise().sum().transpose();
  }
  return g;
}

Eigen::MatrixXd field_gram(const AffineFamily& f, const Quadrature& q) {
  const int m = f.size();
  std::vector<Eigen::MatrixXd> vals(m);
  for (int k = 0; k < m; ++k) vals[k] = (f.a[k] * q.nodes).colwise() + f.b[k];
  Eigen::MatrixXd g(m, m);
  for (int r = 0; r < m; ++r)
    for (int s = r; s < m; ++s) g(r, s) = g(s, r) = q.integrate(vals[r].cwiseProduct(vals[s]).colwise().sum().transpose());
  return g;
}

Eigen::MatrixXd coefficient_gram(const AffineFamily& f) {
  const int m = f.size();
  Eigen::MatrixXd g(m, m);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s) g(r, s) = (f.a[r].array() * f.a[s].array()).sum() + f.b[r].dot(f.b[s]);
  return g;
}

RigidityResult solve(const AffineFamily& f, Eigen::MatrixXd numerator, Eigen::MatrixXd denominator, int d) {
  RigidityResult r;
  r.a = Eigen::MatrixXd::Zero(d, d);
  r.b = Eigen::VectorXd::Zero(d);
  r.numerator = std::move(numerator);
  r.denominator = std::move(denominator);
  auto [lam, v] = smallest_pencil_eigenpair(r.numerator, r.denominator);
  if (!(lam > 0.0))
    throw Error("rigidity", "pencil", "minimal quotient is not positive (" + std::to_string(lam) + ")",
                "the complement may contain a symmetry of phi; tighten the nullspace tolerance");
  r.empty = false;
  r.inverse = lam;
  r.constant = 1.0 / lam;
  r.minimizer = v;
  for (int k = 0; k < f.size(); ++k) {
    r.a += v[k] * f.a[k];
    r.b += v[k] * f.b[k];
  }
  return r;
}

}  // namespace

RigidityResult rigidity_RV(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp) {
  if (decomp.r_phi_c.empty()) return {};
  const AffineFamily f = affine_family(decomp.r_phi_c, true, p.dimension());
  const Eigen::MatrixXd g = gradphi_values(f, q);
  return solve(f, g.transpose() * q.weights.asDiagonal() * g, field_gram(f, q), p.dimension());
}

RigidityResult rigidity_RVL(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp) {
  if (decomp.r_phi_c.empty()) return {};
  const AffineFamily f = affine_family(decomp.r_phi_c, false, p.dimension());
  const Eigen::MatrixXd g = gradphi_values(f, q);
  return solve(f, g.transpose() * q.weights.asDiagonal() * g, field_gram(f, q), p.dimension());
}

RigidityResult rigidity_RD(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp) {
  if (decomp.m_phi_c.empty()) return {};
  const AffineFamily f = affine_family(decomp.m_phi_c, true, p.dimension());
  const Eigen::MatrixXd g = gradphi_values(f, q);
  return solve(f, g.transpose() * q.weights.asDiagonal() * g, coefficient_gram(f), p.dimension());
}

RigidityResult rigidity_RV0(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp,
                            const GalerkinBasis& basis, const OperatorMatrix& lambda) {
  if (decomp.r_phi_c.empty()) return {};
  if (lambda.tag != OperatorTag::lambda_scalar) throw Error("rigidity", "rigidity_RV0", "expects the scalar Lambda");
  const int needed = p.gradient_degree() < 0 ? -1 : p.gradient_degree() + 1;
  if (needed < 0 || needed > basis.degree)
    throw Error("rigidity", "rigidity_RV0",
                "grad phi . (A x + b) is not in the Galerkin span of degree " + std::to_string(basis.degree),
                needed < 0 ? std::string("phi must be polynomial") : "use N >= " + std::to_string(needed));
  const AffineFamily f = affine_family(decomp.r_phi_c, true, p.dimension());
  const Eigen::MatrixXd g = gradphi_values(f, q);
  Eigen::MatrixXd coeffs(basis.size(), f.size());
  for (int k = 0; k < f.size(); ++k) {
    const double res = basis.span_residual(g.col(k), q);
    if (res > 1e-8)
      throw Error("rigidity", "rigidity_RV0", "span residual " + std::to_string(res) + " for grad phi . e_k",
                  "raise N or the quadrature order");
    coeffs.col(k) = basis.project(g.col(k), q);
  }
  const Eigen::MatrixXd inv = lambda_power(lambda, -1.0);
  return solve(f, coeffs.transpose() * inv * coeffs, field_gram(f, q), p.dimension());
}

RigidityReport rigidity_report(const Potential& p, const Quadrature& q, const PhiDecomposition& decomp,
                               const GalerkinBasis& basis, const OperatorMatrix& lambda) {
  return {rigidity_RV(p, q, decomp), rigidity_RD(p, q, decomp), rigidity_RV0(p, q, decomp, basis, lambda),
          rigidity_RVL(p, q, decomp)};
}

}  // namespace korn
