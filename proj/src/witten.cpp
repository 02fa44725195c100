#include "korn/witten.hpp"

#include <cmath>
#include <map>

#include "korn/error.hpp"

namespace korn {

int monomial_count(int d, int k) {
  if (k < 0) return 0;
  // binom(d + k, k)
  long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (d + i) / i;
  return static_cast<int>(c);
}

Eigen::VectorXd GalerkinBasis::project(const Eigen::VectorXd& nodal, const Quadrature& q) const {
  return values.transpose() * q.weights.cwiseProduct(nodal);
}

Eigen::VectorXd GalerkinBasis::coefficients(const Polynomial& p, const Quadrature& q) const {
  return project(node_values(p, q), q);
}

Eigen::VectorXd GalerkinBasis::coefficients(const PolyVectorField& u, const Quadrature& q) const {
  const int n = size();
  Eigen::VectorXd c(vector_size());
  for (int i = 0; i < dimension; ++i) c.segment(i * n, n) = coefficients(u[i], q);
  return c;
}

double GalerkinBasis::span_residual(const Eigen::VectorXd& nodal, const Quadrature& q) const {
  const double total = q.integrate(nodal.cwiseAbs2());
  if (total == 0.0) return 0.0;
  const Eigen::VectorXd c = project(nodal, q);
  const Eigen::VectorXd r = nodal - values * c;
  return std::sqrt(q.integrate(r.cwiseAbs2()) / total);
}

GalerkinBasis build_basis(const Potential& p, const Quadrature& q, int degree) {
  const int d = p.dimension();
  if (degree < 1) throw Error("witten", "build_basis", "degree cap must be >= 1");
  const int grad_deg = std::max(p.gradient_degree(), 0);
  if (2 * degree + grad_deg > q.exactness_degree)
    throw Error("witten", "build_basis",
                "quadrature exactness " + std::to_string(q.exactness_degree) + " is below 2N + deg(grad phi) = " +
                    std::to_string(2 * degree + grad_deg),
                "use quadrature order >= " + std::to_string((2 * degree + grad_deg + 2) / 2));

  GalerkinBasis b;
  b.dimension = d;
  b.degree = degree;
  b.monomials = graded_monomials(d, degree);
  const int k = static_cast<int>(b.monomials.size());
  const Eigen::Index n = q.size();

  const Eigen::VectorXd sigma = q.covariance().diagonal().cwiseSqrt();
  const Eigen::MatrixXd scaled = sigma.cwiseInverse().asDiagonal() * q.nodes;
  NodeEvaluator ev(scaled, degree);
  Eigen::MatrixXd mono(n, k);
  for (int a = 0; a < k; ++a) mono.col(a) = ev.monomial(b.monomials[a]);

  const Eigen::VectorXd sqrt_w = q.weights.cwiseSqrt();
  Eigen::MatrixXd qm(n, k);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);  // mode a = sum_m c(m, a) y^m
  for (int a = 0; a < k; ++a) {
    Eigen::VectorXd v = sqrt_w.cwiseProduct(mono.col(a));
    Eigen::VectorXd coef = Eigen::VectorXd::Unit(k, a);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < a; ++j) {
        const double r = qm.col(j).dot(v);
        v -= r * qm.col(j);
        coef -= r * c.col(j);
      }
    const double norm = v.norm();
    if (!(norm > 1e-13 * sqrt_w.cwiseProduct(mono.col(a)).norm()))
      throw Error("witten", "build_basis", "monomial basis is numerically dependent at degree " + std::to_string(degree),
                  "lower N or raise the quadrature order");
    qm.col(a) = v / norm;
    c.col(a) = coef / norm;
  }
  b.values = mono * c;

  const Eigen::MatrixXd gram = b.values.transpose() * q.weights.asDiagonal() * b.values;
  b.orthonormality_residual = (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (b.orthonormality_residual > 1e-8)
    throw Error("witten", "build_basis",
                "loss of orthogonality: residual " + std::to_string(b.orthonormality_residual),
                "lower N or raise the quadrature order");

  std::map<Multiindex, int> index;
  for (int a = 0; a < k; ++a) index.emplace(b.monomials[a], a);

  b.modes.reserve(k);
  for (int a = 0; a < k; ++a) {
    Polynomial f(d);
    for (int m = 0; m <= a; ++m) {
      double s = c(m, a);
      for (int i = 0; i < d; ++i) s /= std::pow(sigma[i], b.monomials[m][i]);
      f.add_term(b.monomials[m], s);
    }
    b.modes.push_back(std::move(f));
  }

  // T_i = C^{-1} D_i C with D_i differentiating scaled monomials in x_i.
  const Eigen::TriangularView<const Eigen::MatrixXd, Eigen::Upper> cu(c);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd di = Eigen::MatrixXd::Zero(k, k);
    for (int m = 0; m < k; ++m) {
      const Multiindex& e = b.monomials[m];
      if (e[i] == 0) continue;
      Multiindex lower = e;
      lower[i] -= 1;
      di(index.at(lower), m) = e[i] / sigma[i];
    }
    b.derivatives.push_back(cu.solve(di * c));
  }
  return b;
}

const char* to_string(OperatorTag tag) {
  switch (tag) {
    case OperatorTag::lambda_scalar: return "lambda_scalar";
    case OperatorTag::lambda_vector: return "lambda_vector";
    case OperatorTag::deltaS: return "deltaS";
    case OperatorTag::deltaSphi: return "deltaSphi";
  }
  return "unknown";
}

Eigen::VectorXd OperatorMatrix::spectrum() const {
  return is_lambda() ? Eigen::VectorXd(eigenvalues.array() - 1.0) : eigenvalues;
}

int OperatorMatrix::kernel_dimension(double threshold) const {
  return static_cast<int>((spectrum().array() < threshold).count());
}

OperatorMatrix make_operator(OperatorTag tag, const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw Error("witten", "assemble", std::string(to_string(tag)) + " matrix is not symmetric (" +
                                          std::to_string(asym) + ")");
  OperatorMatrix op;
  op.tag = tag;
  op.matrix = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  op.eigenvalues = es.eigenvalues();
  op.eigenvectors = es.eigenvectors();
  return op;
}

namespace {

// H[k][l](a, b) = <d_k f_a d_l f_b>.
std::vector<std::vector<Eigen::MatrixXd>> derivative_grams(const GalerkinBasis& basis, const Quadrature& q) {
  const int d = basis.dimension;
  std::vector<Eigen::MatrixXd> dv(d);
  for (int i = 0; i < d; ++i) dv[i] = basis.derivative_values(i);
  std::vector<std::vector<Eigen::MatrixXd>> h(d, std::vector<Eigen::MatrixXd>(d));
  for (int k = 0; k < d; ++k)
    for (int l = k; l < d; ++l) {
      h[k][l] = dv[k].transpose() * q.weights.asDiagonal() * dv[l];
      if (l != k) h[l][k] = h[k][l].transpose();
    }
  return h;
}

}  // namespace

OperatorMatrix assemble_lambda(const GalerkinBasis& basis, const Quadrature& q) {
  const int n = basis.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd exact = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < basis.dimension; ++i) {
    const Eigen::MatrixXd dv = basis.derivative_values(i);
    m += dv.transpose() * q.weights.asDiagonal() * dv;
    exact += basis.derivatives[i].transpose() * basis.derivatives[i];
  }
  OperatorMatrix op = make_operator(OperatorTag::lambda_scalar, m);
  op.assembly_discrepancy = (m - exact).cwiseAbs().maxCoeff();
  return op;
}

OperatorMatrix assemble_lambda_vector(const GalerkinBasis& basis, const Quadrature& q) {
  const OperatorMatrix s = assemble_lambda(basis, q);
  const int n = basis.size();
  const int d = basis.dimension;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i) m.block(i * n, i * n, n, n) = s.matrix;
  OperatorMatrix op = make_operator(OperatorTag::lambda_vector, m);
  op.assembly_discrepancy = s.assembly_discrepancy;
  return op;
}

OperatorMatrix assemble_vector_operator(const GalerkinBasis& basis, const Quadrature& q, OperatorTag which) {
  if (which != OperatorTag::deltaS && which != OperatorTag::deltaSphi)
    throw Error("witten", "assemble_vector_operator", "tag must be deltaS or deltaSphi");
  const int n = basis.size();
  const int d = basis.dimension;
  const auto h = derivative_grams(basis, q);
  Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < d; ++k) trace += h[k][k];

  // Block (i, j) = (delta_ij <grad f_a . grad f_b> + <d_j f_a d_i f_b>) / 2.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd blk = 0.5 * h[j][i];
      if (i == j) blk += 0.5 * trace;
      m.block(i * n, j * n, n, n) = blk;
    }
  if (which == OperatorTag::deltaSphi)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Eigen::VectorXd w = q.weights.cwiseProduct(q.gradients.row(i).transpose())
                                      .cwiseProduct(q.gradients.row(j).transpose());
        m.block(i * n, j * n, n, n) += basis.values.transpose() * w.asDiagonal() * basis.values;
      }
  return make_operator(which, m);
}

SpectralGap spectral_gap(const OperatorMatrix& lambda, const GalerkinBasis& basis, int exclude_degree,
                         double threshold) {
  if (lambda.tag != OperatorTag::lambda_scalar)
    throw Error("witten", "spectral_gap", "expects the scalar Lambda matrix");
  SpectralGap g;
  Eigen::VectorXd spec;
  if (exclude_degree >= 0) {
    const int skip = monomial_count(basis.dimension, exclude_degree);
    const int rest = basis.size() - skip;
    if (rest <= 0) throw Error("witten", "spectral_gap", "no modes left after exclusion", "raise N");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda.matrix.bottomRightCorner(rest, rest),
                                                      Eigen::EigenvaluesOnly);
    spec = es.eigenvalues().array() - 1.0;
  } else {
    spec = lambda.spectrum();
  }
  g.kernel_dimension = static_cast<int>((spec.array() < threshold).count());
  if (g.kernel_dimension == spec.size()) throw Error("witten", "spectral_gap", "operator has no positive spectrum");
  g.gap = spec[g.kernel_dimension];
  g.c_p_estimate = 1.0 / g.gap;
  return g;
}

Eigen::MatrixXd lambda_power(const OperatorMatrix& lambda, double sigma) {
  if (!lambda.is_lambda()) throw Error("witten", "lambda_power", "operator is not a Lambda matrix");
  if (lambda.eigenvalues.minCoeff() < 1.0 - 1e-6)
    throw Error("witten", "lambda_power",
                "smallest eigenvalue " + std::to_string(lambda.eigenvalues.minCoeff()) + " violates Lambda >= Id");
  const Eigen::VectorXd pw = lambda.eigenvalues.array().pow(sigma);
  return lambda.eigenvectors * pw.asDiagonal() * lambda.eigenvectors.transpose();
}

Eigen::VectorXd lambda_power_apply(const OperatorMatrix& lambda, double sigma, const Eigen::VectorXd& coeffs) {
  if (!lambda.is_lambda()) throw Error("witten", "lambda_power", "operator is not a Lambda matrix");
  if (lambda.eigenvalues.minCoeff() < 1.0 - 1e-6)
    throw Error("witten", "lambda_power",
                "smallest eigenvalue " + std::to_string(lambda.eigenvalues.minCoeff()) + " violates Lambda >= Id");
  if (sigma == 0.0) return coeffs;
  const Eigen::VectorXd pw = lambda.eigenvalues.array().pow(sigma);
  return lambda.eigenvectors * pw.asDiagonal() * (lambda.eigenvectors.transpose() * coeffs);
}

double dual_norm_sq(const OperatorMatrix& lambda, const Eigen::VectorXd& coeffs) {
  const Eigen::VectorXd t = lambda.eigenvectors.transpose() * coeffs;
  return (t.cwiseAbs2().array() / lambda.eigenvalues.array()).sum();
}

}  // namespace korn
