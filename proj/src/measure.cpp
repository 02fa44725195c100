#include "korn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include "korn/error.hpp"

namespace korn {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kMassDefectLimit = 1e-4;
// Envelope variance relative to the per-axis variance for super-quadratic potentials.
constexpr double kQuarticEnvelopeInflation = 0.3;

Polynomial squared_radius(int dim) {
  Polynomial r2(dim);
  for (int i = 0; i < dim; ++i) {
    Multiindex m(dim, 0);
    m[i] = 2;
    r2.add_term(m, 1.0);
  }
  return r2;
}

bool is_even_integer(double g) { return g >= 2.0 && std::floor(g / 2.0) * 2.0 == g; }

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::anisotropic_gaussian: return "anisotropic-gaussian";
    case Family::quartic_radial: return "quartic-radial";
    case Family::perturbed_gaussian: return "perturbed-gaussian";
    case Family::user_supplied: return "user-supplied";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "anisotropic-gaussian") return Family::anisotropic_gaussian;
  if (name == "quartic-radial") return Family::quartic_radial;
  if (name == "perturbed-gaussian") return Family::perturbed_gaussian;
  if (name == "user-supplied") return Family::user_supplied;
  throw Error("measure", "build_potential", "unknown family '" + name + "'",
              "use gaussian | anisotropic-gaussian | quartic-radial | perturbed-gaussian | user-supplied");
}

// ---------------------------------------------------------------------------
// Gauss-Hermite

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw Error("measure", "gauss_hermite", "order must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
  Eigen::VectorXd x = es.eigenvalues();

  // Orthonormal Hermite values psi_{n-1}(t), psi_n(t).
  auto psi = [n](double t) {
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < n; ++j) {
      const double next = (t * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(j + 1.0);
      prev = cur;
      cur = next;
    }
    return std::pair{prev, cur};
  };
  for (int k = 0; k < n; ++k)
    for (int it = 0; it < 3; ++it) {
      auto [pm1, pn] = psi(x[k]);
      x[k] -= pn / (std::sqrt(static_cast<double>(n)) * pm1);
    }

  GaussHermiteRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int k = 0; k < n; ++k) {
    const double t = 0.5 * (x[k] - x[n - 1 - k]);
    rule.nodes[k] = t;
  }
  for (int k = 0; k < n; ++k) {
    auto [pm1, pn] = psi(rule.nodes[k]);
    rule.weights[k] = 1.0 / (n * pm1 * pm1);
  }
  for (int k = 0; k < n; ++k) {
    const double w = 0.5 * (rule.weights[k] + rule.weights[n - 1 - k]);
    rule.weights[k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  rule.weights /= rule.weights.sum();
  return rule;
}

// ---------------------------------------------------------------------------
// Potential

double Potential::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  switch (family_) {
    case Family::gaussian: return 0.5 * x.squaredNorm() + offset_;
    case Family::anisotropic_gaussian: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += x[i] * x[i] / (2.0 * params_[i]);
      return s + offset_;
    }
    case Family::quartic_radial: {
      const double r = x.norm();
      return params_[0] * std::pow(r, params_[1]) + offset_;
    }
    case Family::perturbed_gaussian: {
      const double x1 = x[0];
      return 0.5 * x.squaredNorm() + params_[0] * x1 * x1 * x1 * x1 + offset_;
    }
    case Family::user_supplied: return (*poly_)(std::span<const double>(x.data(), dim_));
  }
  return 0.0;
}

Eigen::VectorXd Potential::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd g(dim_);
  switch (family_) {
    case Family::gaussian: g = x; break;
    case Family::anisotropic_gaussian:
      for (int i = 0; i < dim_; ++i) g[i] = x[i] / params_[i];
      break;
    case Family::quartic_radial: {
      const double r = x.norm();
      const double a = params_[0], gam = params_[1];
      g = r == 0.0 ? Eigen::VectorXd::Zero(dim_) : Eigen::VectorXd(a * gam * std::pow(r, gam - 2.0) * x);
      break;
    }
    case Family::perturbed_gaussian:
      g = x;
      g[0] += 4.0 * params_[0] * x[0] * x[0] * x[0];
      break;
    case Family::user_supplied: {
      std::span<const double> s(x.data(), dim_);
      for (int i = 0; i < dim_; ++i) g[i] = grad_poly_[i](s);
      break;
    }
  }
  return g;
}

Eigen::MatrixXd Potential::hessian(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
  switch (family_) {
    case Family::gaussian: h.setIdentity(); break;
    case Family::anisotropic_gaussian:
      for (int i = 0; i < dim_; ++i) h(i, i) = 1.0 / params_[i];
      break;
    case Family::quartic_radial: {
      const double r = x.norm();
      const double a = params_[0], gam = params_[1];
      if (r == 0.0) {
        if (gam == 2.0) h = 2.0 * a * Eigen::MatrixXd::Identity(dim_, dim_);
        else if (gam < 2.0) h.setConstant(std::numeric_limits<double>::infinity());
        break;
      }
      const double c = a * gam * std::pow(r, gam - 2.0);
      h = c * (Eigen::MatrixXd::Identity(dim_, dim_) + (gam - 2.0) * x * x.transpose() / (r * r));
      break;
    }
    case Family::perturbed_gaussian:
      h.setIdentity();
      h(0, 0) += 12.0 * params_[0] * x[0] * x[0];
      break;
    case Family::user_supplied: {
      std::span<const double> s(x.data(), dim_);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) h(i, j) = hess_poly_[i][j](s);
      break;
    }
  }
  return h;
}

int Potential::gradient_degree() const {
  if (!poly_) return -1;
  int deg = 0;
  for (const auto& g : grad_poly_) deg = std::max(deg, g.degree());
  return deg;
}

namespace {

// Mass and first moments of e^{-p} under the Gaussian-envelope rule on raw weights.
struct EnvelopeMoments {
  double mass = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

EnvelopeMoments envelope_moments(const Polynomial& p, const Eigen::VectorXd& scale, int order) {
  const int d = p.dimension();
  const GaussHermiteRule gh = gauss_hermite(order);
  const double log_det = scale.array().log().sum();
  EnvelopeMoments out{0.0, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  std::vector<int> idx(d, 0);
  Eigen::VectorXd y(d), x(d);
  long total = 1;
  for (int i = 0; i < d; ++i) total *= order;
  for (long k = 0; k < total; ++k) {
    long rem = k;
    double w = 1.0;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % order);
      rem /= order;
      y[i] = gh.nodes[idx[i]];
      w *= gh.weights[idx[i]];
    }
    x = scale.cwiseProduct(y);
    const double f = std::exp(-p(std::span<const double>(x.data(), d)) + 0.5 * y.squaredNorm() + log_det +
                              0.5 * d * kLog2Pi);
    out.mass += w * f;
    out.mean += w * f * x;
    out.variance += w * f * x.cwiseAbs2();
  }
  out.mean /= out.mass;
  out.variance = out.variance / out.mass - out.mean.cwiseAbs2();
  return out;
}

void fill_polynomial_derivatives(Potential& p, std::vector<Polynomial>& grad,
                                 std::vector<std::vector<Polynomial>>& hess, const Polynomial& phi) {
  const int d = phi.dimension();
  grad.clear();
  hess.assign(d, {});
  for (int i = 0; i < d; ++i) grad.push_back(phi.derivative(i));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) hess[i].push_back(grad[i].derivative(j));
  (void)p;
}

}  // namespace

Potential build_potential(const PotentialSpec& spec) {
  const int d = spec.dimension;
  if (d < 1) throw Error("measure", "build_potential", "dimension must be >= 1");
  Potential p;
  p.dim_ = d;
  p.family_ = spec.family;
  p.params_ = spec.params;
  p.shift_ = Eigen::VectorXd::Zero(d);
  p.envelope_ = Eigen::VectorXd::Ones(d);

  switch (spec.family) {
    case Family::gaussian: {
      if (!spec.params.empty())
        throw Error("measure", "build_potential", "gaussian takes no parameters");
      p.offset_ = 0.5 * d * kLog2Pi;
      p.envelope_exact_ = true;
      p.radial_ = true;
      p.covariance_ = Eigen::MatrixXd::Identity(d, d);
      p.poly_ = squared_radius(d) * 0.5 + Polynomial::constant(d, p.offset_);
      break;
    }
    case Family::anisotropic_gaussian: {
      if (static_cast<int>(spec.params.size()) != d)
        throw Error("measure", "build_potential", "anisotropic-gaussian needs one variance per axis");
      double log_prod = 0.0;
      Polynomial poly(d);
      p.covariance_ = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < d; ++i) {
        const double s = spec.params[i];
        if (!(s > 0.0) || !std::isfinite(s))
          throw Error("measure", "build_potential", "variances must be positive and finite");
        log_prod += std::log(s);
        p.envelope_[i] = std::sqrt(s);
        (*p.covariance_)(i, i) = s;
        Multiindex m(d, 0);
        m[i] = 2;
        poly.add_term(m, 0.5 / s);
      }
      p.offset_ = 0.5 * (d * kLog2Pi + log_prod);
      poly.add_term(Multiindex(d, 0), p.offset_);
      p.poly_ = poly;
      p.envelope_exact_ = true;
      p.radial_ = std::all_of(spec.params.begin(), spec.params.end(),
                              [&](double s) { return s == spec.params[0]; });
      break;
    }
    case Family::quartic_radial: {
      if (spec.params.empty() || spec.params.size() > 2)
        throw Error("measure", "build_potential", "quartic-radial takes [alpha] or [alpha, gamma]");
      const double alpha = spec.params[0];
      const double gamma = spec.params.size() == 2 ? spec.params[1] : 4.0;
      if (!(alpha > 0.0)) throw Error("measure", "build_potential", "alpha must be positive");
      if (!(gamma >= 1.0))
        throw Error("measure", "build_potential", "gamma < 1 violates integrability of e^{-phi}",
                    "use gamma >= 1");
      p.params_ = {alpha, gamma};
      // Z = |S^{d-1}| Gamma(d/gamma) / (gamma alpha^{d/gamma})
      const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
      const double z = sphere * std::tgamma(d / gamma) / (gamma * std::pow(alpha, d / gamma));
      p.offset_ = std::log(z);
      const double r2_mean = std::tgamma((d + 2.0) / gamma) / (std::tgamma(d / gamma) * std::pow(alpha, 2.0 / gamma));
      const double axis_var = r2_mean / d;
      p.covariance_ = axis_var * Eigen::MatrixXd::Identity(d, d);
      p.envelope_.setConstant(std::sqrt(kQuarticEnvelopeInflation * axis_var));
      p.radial_ = true;
      if (is_even_integer(gamma)) {
        const Polynomial r2 = squared_radius(d);
        Polynomial pw = Polynomial::constant(d, 1.0);
        for (int k = 0; k < static_cast<int>(gamma) / 2; ++k) pw = pw * r2;
        p.poly_ = pw * alpha + Polynomial::constant(d, p.offset_);
      }
      break;
    }
    case Family::perturbed_gaussian: {
      if (spec.params.size() != 1)
        throw Error("measure", "build_potential", "perturbed-gaussian takes [eps]");
      const double eps = spec.params[0];
      if (!(eps >= 0.0)) throw Error("measure", "build_potential", "eps must be >= 0");
      boost::math::quadrature::sinh_sinh<double> integrator;
      const double line = integrator.integrate(
          [eps](double t) { return std::exp(-0.5 * t * t - eps * t * t * t * t); }, 1e-14);
      p.offset_ = 0.5 * (d - 1) * kLog2Pi + std::log(line);
      Multiindex m4(d, 0);
      m4[0] = 4;
      p.poly_ = squared_radius(d) * 0.5 + Polynomial::monomial(m4, eps) + Polynomial::constant(d, p.offset_);
      p.envelope_exact_ = eps == 0.0;
      p.radial_ = eps == 0.0 || d == 1;
      if (eps == 0.0) p.covariance_ = Eigen::MatrixXd::Identity(d, d);
      break;
    }
    case Family::user_supplied: {
      if (!spec.polynomial) throw Error("measure", "build_potential", "user-supplied family needs a polynomial");
      if (spec.polynomial->dimension() != d)
        throw Error("measure", "build_potential", "polynomial dimension does not match");
      if (static_cast<int>(spec.params.size()) == d)
        for (int i = 0; i < d; ++i) {
          if (!(spec.params[i] > 0.0)) throw Error("measure", "build_potential", "envelope scales must be positive");
          p.envelope_[i] = spec.params[i];
        }
      else if (!spec.params.empty())
        throw Error("measure", "build_potential", "user-supplied params are per-axis envelope scales");
      const int order = spec.normalization_order;
      if (order < 6) throw Error("measure", "build_potential", "normalization order must be >= 6");
      Polynomial raw = *spec.polynomial;
      raw.add_term(Multiindex(d, 0), -raw.coefficient(Multiindex(d, 0)));
      // Re-centre and, unless scales were given, fit the envelope to the
      // per-axis variance until both settle.
      const bool auto_scale = spec.params.empty();
      const double inflation = raw.degree() > 2 ? kQuarticEnvelopeInflation : 1.0;
      Eigen::VectorXd shift = Eigen::VectorXd::Zero(d);
      EnvelopeMoments em;
      for (int it = 0; it < 12; ++it) {
        const Polynomial shifted = raw.translated(std::span<const double>(shift.data(), d));
        em = envelope_moments(shifted, p.envelope_, order);
        if (!std::isfinite(em.mass) || !(em.mass > 0.0) || !em.variance.allFinite())
          throw Error("measure", "normalize", "normalization integral is not finite",
                      "phi must grow at infinity; check the leading terms");
        shift += em.mean;
        double change = 0.0;
        if (auto_scale) {
          const Eigen::VectorXd next = (inflation * em.variance.cwiseMax(1e-300)).cwiseSqrt();
          change = ((next - p.envelope_).cwiseQuotient(p.envelope_)).cwiseAbs().maxCoeff();
          p.envelope_ = next;
        }
        if (em.mean.norm() < 1e-14 && change < 1e-8) break;
      }
      const Polynomial shifted = raw.translated(std::span<const double>(shift.data(), d));
      em = envelope_moments(shifted, p.envelope_, order);
      const double coarse = envelope_moments(shifted, p.envelope_, order - 4).mass;
      const double rel = std::abs(coarse - em.mass) / em.mass;
      if (rel > kMassDefectLimit)
        throw Error("measure", "normalize",
                    "normalization integral does not converge on the envelope rule (relative change " +
                        std::to_string(rel) + " between orders " + std::to_string(order - 4) + " and " +
                        std::to_string(order) + ")",
                    "raise normalization_order or adjust envelope scales");
      p.shift_ = shift;
      p.offset_ = std::log(em.mass);
      p.poly_ = shifted + Polynomial::constant(d, p.offset_);
      break;
    }
  }
  if (p.poly_) fill_polynomial_derivatives(p, p.grad_poly_, p.hess_poly_, *p.poly_);
  return p;
}

Potential build_potential(Family family, std::vector<double> params, int dim) {
  PotentialSpec spec;
  spec.family = family;
  spec.params = std::move(params);
  spec.dimension = dim;
  return build_potential(spec);
}

// ---------------------------------------------------------------------------
// Quadrature

Eigen::MatrixXd Quadrature::covariance() const {
  return nodes * weights.asDiagonal() * nodes.transpose();
}

Quadrature build_quadrature(const Potential& p, int order, const QuadratureLimits& limits) {
  const int d = p.dimension();
  if (order < 2) throw Error("measure", "build_quadrature", "order must be >= 2");
  if (d > limits.max_dimension)
    throw Error("measure", "build_quadrature", "dimension exceeds cap " + std::to_string(limits.max_dimension));
  long total = 1;
  for (int i = 0; i < d; ++i) {
    total *= order;
    if (total > limits.max_nodes)
      throw Error("measure", "build_quadrature",
                  "tensor rule of order " + std::to_string(order) + " in d=" + std::to_string(d) +
                      " exceeds the node cap " + std::to_string(limits.max_nodes),
                  "lower the order");
  }

  const GaussHermiteRule gh = gauss_hermite(order);
  const Eigen::VectorXd& scale = p.envelope_scale();
  const double log_env = scale.array().log().sum() + 0.5 * d * kLog2Pi;

  Quadrature q;
  q.dimension = d;
  q.order = order;
  q.exactness_degree = 2 * order - 1;
  q.exact = p.envelope_exact();
  q.nodes.resize(d, total);
  q.weights.resize(total);
  q.gradients.resize(d, total);
  q.hessians.resize(d * d, total);

  std::vector<int> idx(d, 0);
  Eigen::VectorXd y(d);
  for (long k = 0; k < total; ++k) {
    long rem = k;
    double w = 1.0;
    for (int i = d - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % order);
      rem /= order;
      y[i] = gh.nodes[idx[i]];
      w *= gh.weights[idx[i]];
    }
    q.nodes.col(k) = scale.cwiseProduct(y);
    if (!q.exact) w *= std::exp(-p.value(q.nodes.col(k)) + 0.5 * y.squaredNorm() + log_env);
    q.weights[k] = w;
  }
  const double mass = q.weights.sum();
  q.mass_defect = std::abs(mass - 1.0);
  if (!(q.mass_defect <= kMassDefectLimit))
    throw Error("measure", "build_quadrature",
                "mass defect " + std::to_string(q.mass_defect) + " before renormalization exceeds 1e-4",
                "raise the order or rescale the envelope");
  q.weights /= mass;

  for (long k = 0; k < total; ++k) {
    q.gradients.col(k) = p.gradient(q.nodes.col(k));
    const Eigen::MatrixXd h = p.hessian(q.nodes.col(k));
    q.hessians.col(k) = Eigen::Map<const Eigen::VectorXd>(h.data(), d * d);
  }
  return q;
}

double moment(const Quadrature& q, const Multiindex& m) {
  if (static_cast<int>(m.size()) != q.dimension) throw Error("measure", "moment", "multiindex length mismatch");
  const int deg = total_degree(m);
  if (deg > q.exactness_degree)
    throw Error("measure", "moment",
                "degree " + std::to_string(deg) + " exceeds exactness degree " + std::to_string(q.exactness_degree),
                "use quadrature order >= " + std::to_string((deg + 2) / 2));
  NodeEvaluator ev(q.nodes, deg);
  return q.integrate(ev.monomial(m));
}

// ---------------------------------------------------------------------------
// Regularity constants

double domain_toolbox_constant(double c_phi, double c_phi_prime, int d) {
  const double cp2 = c_phi_prime * c_phi_prime;
  const double c = 277.0 / 8.0 * (c_phi - 1.0) * cp2;
  return 81.0 * cp2 / c_phi + 196.0 * cp2 + c / d + 0.5 * (d + std::sqrt(static_cast<double>(d) * d + 4.0 * c));
}

bool regularity_inequalities_hold(const RegularityConstants& c, const Eigen::VectorXd& grad,
                                  const Eigen::MatrixXd& hess) {
  // Both sides are compared up to 1e-14 relative rounding; the Gaussian
  // closed forms are tight at the origin.
  constexpr double slack = 1.0 + 1e-14;
  const double d = static_cast<double>(grad.size());
  const double h = hess.norm();
  const double g2 = grad.squaredNorm();
  const bool first = 4.0 * std::sqrt(d) * h <= (g2 + c.c_phi - 1.0) * slack;
  const bool second = 4.0 * h <= (g2 + c.c_phi_prime) / std::sqrt(c.c_phi) * slack;
  return first && second;
}

namespace {

// |grad phi|^2 and |D^2 phi| sampled on a point set.
struct Samples {
  std::vector<double> grad_sq;
  std::vector<double> hess_norm;

  void add(double g2, double h) {
    grad_sq.push_back(g2);
    hess_norm.push_back(h);
  }
  template <class F>
  double sup(F f) const {
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grad_sq.size(); ++k) s = std::max(s, f(grad_sq[k], hess_norm[k]));
    return s;
  }
};

void add_points(Samples& out, const Potential& p, const Eigen::MatrixXd& pts) {
  for (Eigen::Index k = 0; k < pts.cols(); ++k)
    out.add(p.gradient(pts.col(k)).squaredNorm(), p.hessian(pts.col(k)).norm());
}

// Radial potentials: both norms depend on |x| only, so a dense ray scan
// reaches the supremum far outside the node cloud.
void add_ray(Samples& out, const Potential& p, double radius) {
  constexpr int n = 20000;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p.dimension());
  for (int k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    x[0] = radius * t * t;
    out.add(p.gradient(x).squaredNorm(), p.hessian(x).norm());
  }
}

}  // namespace

RegularityConstants estimate_regularity_constants(const Potential& p, const Quadrature& q) {
  const int d = p.dimension();
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double floor_c = 8.0 * (1.0 + kStrictMargin);
  RegularityConstants rc;

  if (p.family() == Family::gaussian || p.family() == Family::anisotropic_gaussian) {
    // |D^2 phi| is the constant h = (sum 1/s_i^2)^{1/2}; both bounds are tight at x = 0.
    double h2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double s = p.family() == Family::gaussian ? 1.0 : p.params()[i];
      h2 += 1.0 / (s * s);
    }
    const double h = std::sqrt(h2);
    rc.c_phi = std::max(1.0 + 4.0 * sqrt_d * h, floor_c);
    rc.c_phi_prime = std::max(4.0 * h * std::sqrt(rc.c_phi), rc.c_phi * (1.0 + kStrictMargin));
    rc.c_b = domain_toolbox_constant(rc.c_phi, rc.c_phi_prime, d);
    rc.epsilon = 1.0 / (2.0 * std::sqrt(rc.c_b));
    rc.c_phi_second = h;
    rc.method = ConstantMethod::closed_form;
    rc.certified = true;
    return rc;
  }

  Samples base, stretched;
  for (Eigen::Index k = 0; k < q.size(); ++k) base.add(q.gradients.col(k).squaredNorm(), q.hessian(k).norm());
  add_points(stretched, p, 1.5 * q.nodes);
  if (p.radial()) {
    const double radius = 100.0 * std::max(1.0, p.envelope_scale().maxCoeff());
    add_ray(base, p, radius);
    add_ray(stretched, p, 1.5 * radius);
  }

  auto first = [&](double g2, double h) { return 4.0 * sqrt_d * h - g2 + 1.0; };
  rc.c_phi = std::max(kSupremumSafety * base.sup(first), floor_c);
  const double root_c = std::sqrt(rc.c_phi);
  auto second = [&](double g2, double h) { return 4.0 * root_c * h - g2; };
  rc.c_phi_prime = std::max(kSupremumSafety * base.sup(second), rc.c_phi * (1.0 + kStrictMargin));
  rc.c_b = domain_toolbox_constant(rc.c_phi, rc.c_phi_prime, d);
  rc.epsilon = 1.0 / (2.0 * std::sqrt(rc.c_b));
  auto third = [&](double g2, double h) { return h - rc.epsilon * g2; };
  rc.c_phi_second = std::max(kSupremumSafety * base.sup(third), 0.0);
  rc.method = ConstantMethod::node_supremum;
  rc.certified = false;
  rc.growth_detected = stretched.sup(first) > rc.c_phi || stretched.sup(second) > rc.c_phi_prime ||
                       stretched.sup(third) > rc.c_phi_second;
  return rc;
}

}  // namespace korn
