#include "korn/projections.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "korn/error.hpp"

namespace korn {

double linear_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& covariance) {
  return (a.transpose() * b * covariance).trace();
}

Eigen::MatrixXd rotation_generator(int d, int i, int j) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  a(i, j) = -1.0;
  a(j, i) = 1.0;
  return a;
}

RotationBasis rotation_basis(const Quadrature& q, int d) {
  if (d < 1) throw Error("projections", "rotation_basis", "dimension must be >= 1");
  if (d != q.dimension) throw Error("projections", "rotation_basis", "dimension differs from quadrature");
  RotationBasis rb;
  rb.dimension = d;
  rb.covariance = q.covariance();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      rb.pairs.emplace_back(i, j);
      const double z = std::sqrt(rb.covariance(i, i) + rb.covariance(j, j));
      rb.normalization.push_back(z);
      rb.matrices.push_back(rotation_generator(d, i, j) / z);
    }
  // Modified Gram-Schmidt; a no-op when the covariance is diagonal.
  constexpr double kOrthogonalTol = 1e-14;
  for (std::size_t r = 0; r < rb.matrices.size(); ++r) {
    for (std::size_t s = 0; s < r; ++s) {
      const double c = linear_inner(rb.matrices[s], rb.matrices[r], rb.covariance);
      if (std::abs(c) > kOrthogonalTol) {
        rb.matrices[r] -= c * rb.matrices[s];
        rb.gram_schmidt_applied = true;
      }
    }
    const double n2 = linear_inner(rb.matrices[r], rb.matrices[r], rb.covariance);
    if (std::abs(n2 - 1.0) > kOrthogonalTol) rb.matrices[r] /= std::sqrt(n2);
  }
  return rb;
}

namespace {

// <u . M x> for each matrix M.
Eigen::VectorXd linear_coefficients(const PolyVectorField& u, const std::vector<Eigen::MatrixXd>& mats,
                                    const Quadrature& q) {
  const int d = u.dimension();
  Eigen::MatrixXd uv(d, q.size());
  for (int i = 0; i < d; ++i) uv.row(i) = node_values(u[i], q).transpose();
  Eigen::VectorXd c(mats.size());
  for (std::size_t r = 0; r < mats.size(); ++r) {
    const Eigen::MatrixXd mx = mats[r] * q.nodes;
    c[r] = q.integrate(uv.cwiseProduct(mx).colwise().sum().transpose());
  }
  return c;
}

FieldProjection combine(const std::vector<Eigen::MatrixXd>& mats, Eigen::VectorXd coeffs, int d) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t r = 0; r < mats.size(); ++r) a += coeffs[r] * mats[r];
  return {PolyVectorField::linear(a), std::move(coeffs)};
}

}  // namespace

FieldProjection project_R(const PolyVectorField& u, const RotationBasis& rb, const Quadrature& q) {
  if (u.dimension() != rb.dimension) throw Error("projections", "project_R", "dimension mismatch");
  return combine(rb.matrices, linear_coefficients(u, rb.matrices, q), rb.dimension);
}

Eigen::MatrixXd project_Ma(const PolyMatrixField& f, const Quadrature& q) {
  const Eigen::MatrixXd m = mean(f, q);
  return 0.5 * (m - m.transpose());
}

PhiDecomposition detect_Rphi(const Potential& p, const Quadrature& q, const RotationBasis& rb, double tol) {
  if (!(tol > 0.0)) throw Error("projections", "detect_Rphi", "tolerance must be positive");
  const int d = p.dimension();
  const int m = rb.size();
  PhiDecomposition out;
  out.tolerance = tol;
  out.gap_ratio = std::numeric_limits<double>::infinity();
  if (m == 0) {
    out.gram_eigenvalues.resize(0);
    out.symmetry_singular_values.resize(0);
    return out;
  }

  // Values of grad phi . M_r x at every node.
  Eigen::MatrixXd g(q.size(), m);
  double scale = 0.0;
  const Eigen::VectorXd grad_sq = q.gradients.colwise().squaredNorm().transpose();
  for (int r = 0; r < m; ++r) {
    const Eigen::MatrixXd mx = rb.matrices[r] * q.nodes;
    g.col(r) = q.gradients.cwiseProduct(mx).colwise().sum().transpose();
    scale = std::max(scale, q.integrate(grad_sq.cwiseProduct(mx.colwise().squaredNorm().transpose())));
  }
  const Eigen::MatrixXd gram = g.transpose() * q.weights.asDiagonal() * g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
  out.gram_eigenvalues = es.eigenvalues();
  out.symmetry_singular_values = out.gram_eigenvalues.cwiseMax(0.0).cwiseSqrt();
  out.threshold = tol * tol * scale;

  std::vector<Eigen::MatrixXd> frob_basis;
  for (auto [i, j] : rb.pairs) frob_basis.push_back(rotation_generator(d, i, j) / std::sqrt(2.0));

  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < m; ++r) a += es.eigenvectors()(r, k) * rb.matrices[r];
    const double lam = out.gram_eigenvalues[k];
    if (lam < out.threshold) out.r_phi.push_back(a);
    else {
      out.r_phi_c.push_back(a);
      out.gap_ratio = std::min(out.gap_ratio, lam / std::max(out.threshold, std::numeric_limits<double>::min()));
    }
  }
  if (!out.r_phi.empty() && out.gap_ratio < 1e4) {
    out.ill_conditioned = true;
    std::ostringstream os;
    os << "smallest non-kernel Gram eigenvalue is only " << out.gap_ratio
       << " times the kernel threshold; R_phi membership is fragile";
    out.warning = os.str();
  }

  // M_phi: Frobenius-orthonormalize the matrices of R_phi.
  const int k_phi = static_cast<int>(out.r_phi.size());
  if (k_phi == 0) {
    out.m_phi_c = frob_basis;
    return out;
  }
  Eigen::MatrixXd coords(m, k_phi);
  for (int k = 0; k < k_phi; ++k)
    for (int r = 0; r < m; ++r) coords(r, k) = (frob_basis[r].array() * out.r_phi[k].array()).sum();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(coords);
  const Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < m; ++r) a += qfull(r, k) * frob_basis[r];
    (k < k_phi ? out.m_phi : out.m_phi_c).push_back(a);
  }
  return out;
}

FieldProjection project_Rphi(const PolyVectorField& u, const PhiDecomposition& decomp, const Quadrature& q) {
  return combine(decomp.r_phi, linear_coefficients(u, decomp.r_phi, q), u.dimension());
}

Eigen::MatrixXd project_Mphi(const Eigen::MatrixXd& a, const PhiDecomposition& decomp) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (const auto& b : decomp.m_phi) out += (a.array() * b.array()).sum() * b;
  return out;
}

Eigen::MatrixXd project_Mphi(const PolyMatrixField& f, const PhiDecomposition& decomp, const Quadrature& q) {
  return project_Mphi(mean(f, q), decomp);
}

}  // namespace korn
