#include "korn/kinetic.hpp"

#include <algorithm>

#include "korn/error.hpp"

namespace korn {

namespace {

// E[v^k] for a standard normal: (k-1)!! for even k, 0 for odd.
double gaussian_moment(int k) {
  if (k % 2) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

double velocity_moment(const Multiindex& m, int d, int extra) {
  double out = 1.0;
  for (int j = 0; j < d; ++j) out *= gaussian_moment(m[d + j] + (j == extra ? 1 : 0));
  return out;
}

}  // namespace

PhaseField::PhaseField(int d, Polynomial poly) : dimension(d), h(std::move(poly)) {
  if (h.dimension() != 2 * d) throw Error("kinetic", "phase_field", "polynomial must have 2d variables");
}

Polynomial PhaseField::lift_x(const Polynomial& p) {
  const int d = p.dimension();
  Polynomial out(2 * d);
  for (const auto& [m, c] : p.terms()) {
    Multiindex e(2 * d, 0);
    std::copy(m.begin(), m.end(), e.begin());
    out.add_term(e, c);
  }
  return out;
}

PhaseQuadrature build_phase_quadrature(const Quadrature& xrule, int v_order, int max_degree) {
  const int d = xrule.dimension;
  const GaussHermiteRule gh = gauss_hermite(v_order);
  Eigen::Index nv = 1;
  for (int j = 0; j < d; ++j) nv *= v_order;
  PhaseQuadrature q;
  q.dimension = d;
  q.nodes.resize(2 * d, xrule.size() * nv);
  q.weights.resize(xrule.size() * nv);
  q.gradients.resize(d, xrule.size() * nv);
  Eigen::Index col = 0;
  std::vector<int> idx(d, 0);
  for (Eigen::Index k = 0; k < nv; ++k) {
    double w = 1.0;
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j) {
      v[j] = gh.nodes[idx[j]];
      w *= gh.weights[idx[j]];
    }
    for (Eigen::Index i = 0; i < xrule.size(); ++i, ++col) {
      q.nodes.col(col) << xrule.nodes.col(i), v;
      q.weights[col] = w * xrule.weights[i];
      q.gradients.col(col) = xrule.gradients.col(i);
    }
    for (int j = 0; j < d && ++idx[j] == v_order; ++j) idx[j] = 0;
  }
  q.evaluator = std::make_shared<const NodeEvaluator>(q.nodes, max_degree);
  return q;
}

PhaseField collision_project(const PhaseField& h) {
  const int d = h.dimension;
  Polynomial out(2 * d);
  for (const auto& [m, c] : h.h.terms()) {
    Multiindex xpart(2 * d, 0);
    std::copy(m.begin(), m.begin() + d, xpart.begin());
    out.add_term(xpart, c * velocity_moment(m, d, -1));
    for (int i = 0; i < d; ++i) {
      const double mom = velocity_moment(m, d, i);
      if (mom == 0.0) continue;
      Multiindex e = xpart;
      e[d + i] = 1;
      out.add_term(e, c * mom);
    }
  }
  return {d, out};
}

PhaseField collision_operator(const PhaseField& h) { return {h.dimension, collision_project(h).h - h.h}; }

Eigen::VectorXd phase_values(const PhaseField& h, const PhaseQuadrature& q) {
  if (q.evaluator && h.h.degree() <= q.evaluator->max_degree()) return q.evaluator->evaluate(h.h);
  return NodeEvaluator(q.nodes, std::max(h.h.degree(), 0)).evaluate(h.h);
}

double phase_inner(const PhaseField& a, const PhaseField& b, const PhaseQuadrature& q) {
  return q.integrate(phase_values(a, q).cwiseProduct(phase_values(b, q)));
}

double transport_residual(const PhaseField& h, const PhaseQuadrature& q) {
  const int d = h.dimension;
  Polynomial stream(2 * d);
  for (int i = 0; i < d; ++i) stream += PhaseField::v(d, i) * h.h.derivative(i);
  Eigen::VectorXd res = phase_values({d, stream - collision_operator(h).h}, q);
  for (int i = 0; i < d; ++i)
    res -= q.gradients.row(i).transpose().cwiseProduct(phase_values({d, h.h.derivative(d + i)}, q));
  return std::sqrt(q.integrate(res.cwiseAbs2()));
}

double stationary_residual(const PolyVectorField& r, double c, const PhaseQuadrature& q) {
  const int d = q.dimension;
  if (r.dimension() != d) throw Error("kinetic", "stationary_residual", "field dimension differs from the rule");
  Polynomial h = Polynomial::constant(2 * d, c);
  for (int i = 0; i < d; ++i) h += PhaseField::lift_x(r[i]) * PhaseField::v(d, i);
  return transport_residual({d, h}, q);
}

DissipationIdentity dissipation_identity(const PhaseField& h, const PhaseQuadrature& q) {
  const PhaseField lh = collision_operator(h);
  return {2.0 * phase_inner(lh, h, q), -2.0 * phase_inner(lh, lh, q)};
}

Eigen::VectorXd collision_invariants(const PhaseField& h, const PhaseQuadrature& q) {
  const int d = h.dimension;
  const Eigen::VectorXd lh = phase_values(collision_operator(h), q);
  Eigen::VectorXd out(d + 1);
  out[0] = q.integrate(lh);
  for (int i = 0; i < d; ++i) out[i + 1] = q.integrate(lh.cwiseProduct(q.nodes.row(d + i).transpose()));
  return out;
}

PhaseField random_phase_field(int d, int max_degree, CoefficientStream& rng) {
  return {d, random_polynomial(2 * d, max_degree, rng)};
}

}  // namespace korn
