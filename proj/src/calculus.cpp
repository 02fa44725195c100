#include "korn/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "korn/error.hpp"

namespace korn {

// ---------------------------------------------------------------------------
// PolyVectorField

PolyVectorField::PolyVectorField(int dim) : comps_(dim, Polynomial(dim)) {
  if (dim < 1) throw Error("calculus", "field", "dimension must be >= 1");
}

PolyVectorField::PolyVectorField(std::vector<Polynomial> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw Error("calculus", "field", "field needs at least one component");
  const int d = dimension();
  for (const auto& c : comps_)
    if (c.dimension() != d)
      throw Error("calculus", "field", "component dimension differs from component count");
}

PolyVectorField PolyVectorField::affine(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int d = static_cast<int>(b.size());
  if (a.rows() != d || a.cols() != d) throw Error("calculus", "field", "affine map shape mismatch");
  PolyVectorField u(d);
  for (int i = 0; i < d; ++i) {
    u[i].add_term(Multiindex(d, 0), b[i]);
    for (int j = 0; j < d; ++j) {
      Multiindex m(d, 0);
      m[j] = 1;
      u[i].add_term(m, a(i, j));
    }
  }
  return u;
}

PolyVectorField PolyVectorField::constant(const Eigen::VectorXd& b) {
  return affine(Eigen::MatrixXd::Zero(b.size(), b.size()), b);
}

PolyVectorField PolyVectorField::linear(const Eigen::MatrixXd& a) {
  return affine(a, Eigen::VectorXd::Zero(a.rows()));
}

int PolyVectorField::degree() const {
  int deg = -1;
  for (const auto& c : comps_) deg = std::max(deg, c.degree());
  return deg;
}

PolyVectorField& PolyVectorField::operator+=(const PolyVectorField& o) {
  if (o.dimension() != dimension()) throw Error("calculus", "field", "dimension mismatch in sum");
  for (int i = 0; i < dimension(); ++i) comps_[i] += o.comps_[i];
  return *this;
}

PolyVectorField& PolyVectorField::operator-=(const PolyVectorField& o) {
  if (o.dimension() != dimension()) throw Error("calculus", "field", "dimension mismatch in difference");
  for (int i = 0; i < dimension(); ++i) comps_[i] -= o.comps_[i];
  return *this;
}

PolyVectorField& PolyVectorField::operator*=(double s) {
  for (auto& c : comps_) c *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// PolyMatrixField

PolyMatrixField::PolyMatrixField(int dim, Symmetry symmetry)
    : dim_(dim), symmetry_(symmetry), entries_(static_cast<std::size_t>(dim) * dim, Polynomial(dim)) {}

PolyMatrixField PolyMatrixField::constant(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  Symmetry s = Symmetry::none;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0) s = Symmetry::symmetric;
  else if ((a + a.transpose()).cwiseAbs().maxCoeff() == 0.0) s = Symmetry::antisymmetric;
  PolyMatrixField f(d, s);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) = Polynomial::constant(d, a(i, j));
  return f;
}

bool PolyMatrixField::symmetry_consistent(double tol) const {
  if (symmetry_ == Symmetry::none) return true;
  const double sign = symmetry_ == Symmetry::symmetric ? -1.0 : 1.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      Polynomial r = (*this)(i, j) + (*this)(j, i) * sign;
      if (r.max_abs_coefficient() > tol) return false;
    }
  return true;
}

double PolyMatrixField::max_abs_coefficient() const {
  double mx = 0.0;
  for (const auto& e : entries_) mx = std::max(mx, e.max_abs_coefficient());
  return mx;
}

PolyMatrixField PolyMatrixField::operator+(const PolyMatrixField& o) const {
  if (o.dim_ != dim_) throw Error("calculus", "matrix", "dimension mismatch in sum");
  PolyMatrixField r(dim_, symmetry_ == o.symmetry_ ? symmetry_ : Symmetry::none);
  for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = entries_[k] + o.entries_[k];
  return r;
}

PolyMatrixField PolyMatrixField::operator-(const PolyMatrixField& o) const {
  if (o.dim_ != dim_) throw Error("calculus", "matrix", "dimension mismatch in difference");
  PolyMatrixField r(dim_, symmetry_ == o.symmetry_ ? symmetry_ : Symmetry::none);
  for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = entries_[k] - o.entries_[k];
  return r;
}

// ---------------------------------------------------------------------------
// Differentials

Differential differentiate(const PolyVectorField& u) {
  const int d = u.dimension();
  Differential out{PolyMatrixField(d), PolyMatrixField(d, Symmetry::symmetric),
                   PolyMatrixField(d, Symmetry::antisymmetric)};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.full(i, j) = u[i].derivative(j);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      out.sym(i, j) = (out.full(i, j) + out.full(j, i)) * 0.5;
      out.antisym(i, j) = (out.full(i, j) - out.full(j, i)) * 0.5;
    }
  return out;
}

Polynomial divergence(const PolyVectorField& u) {
  Polynomial div(u.dimension());
  for (int i = 0; i < u.dimension(); ++i) div += u[i].derivative(i);
  return div;
}

// ---------------------------------------------------------------------------
// Weighted integrals

Eigen::VectorXd node_values(const Polynomial& p, const Quadrature& q) {
  if (p.dimension() != q.dimension) throw Error("calculus", "evaluate", "dimension mismatch with quadrature");
  if (p.is_zero()) return Eigen::VectorXd::Zero(q.size());
  NodeEvaluator ev(q.nodes, std::max(p.degree(), 0));
  return ev.evaluate(p);
}

Eigen::VectorXd weight_values(const Quadrature& q, Weight w) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(q.size());
  if (w == Weight::one) return v;
  v += q.gradients.colwise().squaredNorm().transpose();
  if (w == Weight::gradphi) v = v.cwiseSqrt();
  return v;
}

namespace {

double weighted_sum(const Eigen::VectorXd& products, const Quadrature& q, Weight w) {
  if (w == Weight::one) return q.integrate(products);
  return q.integrate(products.cwiseProduct(weight_values(q, w)));
}

}  // namespace

double weighted_inner(const Polynomial& a, const Polynomial& b, const Quadrature& q, Weight w) {
  if (a.dimension() != b.dimension()) throw Error("calculus", "weighted_inner", "shape mismatch");
  return weighted_sum(node_values(a, q).cwiseProduct(node_values(b, q)), q, w);
}

double weighted_inner(const PolyVectorField& a, const PolyVectorField& b, const Quadrature& q, Weight w) {
  if (a.dimension() != b.dimension()) throw Error("calculus", "weighted_inner", "shape mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(q.size());
  for (int i = 0; i < a.dimension(); ++i) acc += node_values(a[i], q).cwiseProduct(node_values(b[i], q));
  return weighted_sum(acc, q, w);
}

double weighted_inner(const PolyMatrixField& a, const PolyMatrixField& b, const Quadrature& q, Weight w) {
  if (a.dimension() != b.dimension()) throw Error("calculus", "weighted_inner", "shape mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(q.size());
  const int d = a.dimension();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc += node_values(a(i, j), q).cwiseProduct(node_values(b(i, j), q));
  return weighted_sum(acc, q, w);
}

Eigen::VectorXd mean(const PolyVectorField& u, const Quadrature& q) {
  Eigen::VectorXd m(u.dimension());
  for (int i = 0; i < u.dimension(); ++i) m[i] = q.integrate(node_values(u[i], q));
  return m;
}

Eigen::MatrixXd mean(const PolyMatrixField& f, const Quadrature& q) {
  const int d = f.dimension();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = q.integrate(node_values(f(i, j), q));
  return m;
}

Eigen::VectorXd gradphi_dot_values(const PolyVectorField& u, const Quadrature& q) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(q.size());
  for (int i = 0; i < u.dimension(); ++i)
    v += q.gradients.row(i).transpose().cwiseProduct(node_values(u[i], q));
  return v;
}

Polynomial phi_divergence(const PolyVectorField& u, const Potential& p) {
  if (!p.polynomial())
    throw Error("calculus", "phi_divergence", "grad phi is not polynomial for this potential",
                "use phi_divergence_values for nodal evaluation");
  Polynomial r = divergence(u);
  const auto& g = p.gradient_polynomials();
  for (int i = 0; i < u.dimension(); ++i) r -= g[i] * u[i];
  return r;
}

Eigen::VectorXd phi_divergence_values(const PolyVectorField& u, const Quadrature& q) {
  return node_values(divergence(u), q) - gradphi_dot_values(u, q);
}

// ---------------------------------------------------------------------------
// Schwarz identity

std::vector<Polynomial> schwarz_residual(const PolyVectorField& u) {
  const int d = u.dimension();
  const Differential du = differentiate(u);
  std::vector<Polynomial> out;
  out.reserve(static_cast<std::size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        out.push_back(du.antisym(i, j).derivative(k) - du.sym(i, k).derivative(j) + du.sym(j, k).derivative(i));
  return out;
}

bool schwarz_vanishes(const std::vector<Polynomial>& residual, double tol) {
  return std::all_of(residual.begin(), residual.end(),
                     [tol](const Polynomial& p) { return p.max_abs_coefficient() <= tol; });
}

IdentityTerms identity_terms(const PolyVectorField& u, const Quadrature& q) {
  const int d = u.dimension();
  const Differential du = differentiate(u);
  IdentityTerms t;
  std::vector<Eigen::VectorXd> uv(d);
  for (int i = 0; i < d; ++i) uv[i] = node_values(u[i], q);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Eigen::VectorXd f = node_values(du.full(i, j), q);
      const Eigen::VectorXd s = node_values(du.sym(i, j), q);
      const Eigen::VectorXd a = node_values(du.antisym(i, j), q);
      t.full += q.integrate(f.cwiseAbs2());
      t.sym += q.integrate(s.cwiseAbs2());
      t.antisym += q.integrate(a.cwiseAbs2());
      // D^2 phi : u (x) u = sum_ij phi_ij u_i u_j; column-major d*d layout.
      t.hess_form += q.integrate(q.hessians.row(i + j * d).transpose().cwiseProduct(uv[i]).cwiseProduct(uv[j]));
    }
  t.phi_div = q.integrate(phi_divergence_values(u, q).cwiseAbs2());
  return t;
}

PolyVectorField random_field(int dim, int max_degree, CoefficientStream& rng) {
  std::vector<Polynomial> comps;
  comps.reserve(dim);
  for (int i = 0; i < dim; ++i) comps.push_back(random_polynomial(dim, max_degree, rng));
  return PolyVectorField(std::move(comps));
}

}  // namespace korn
