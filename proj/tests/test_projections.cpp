#include <cmath>

#include <doctest.h>

#include "korn/projections.hpp"
#include "oracles.hpp"

using namespace korn;

namespace {

struct Setup {
  Potential p;
  Quadrature q;
  RotationBasis rb;
  PhiDecomposition dec;
  Setup(Family f, std::vector<double> params, int d, int order = 8)
      : p(build_potential(f, std::move(params), d)),
        q(build_quadrature(p, order)),
        rb(rotation_basis(q, d)),
        dec(detect_Rphi(p, q, rb)) {}
};

Polynomial x(int d, int i) { return Polynomial::coordinate(d, i); }

}  // namespace

TEST_SUITE("projections") {
  TEST_CASE("rotation basis normalization") {
    const Setup g2(Family::gaussian, {}, 2);
    REQUIRE(g2.rb.size() == 1);
    CHECK(g2.rb.normalization[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    const Setup a2(Family::anisotropic_gaussian, {1, 2}, 2);
    CHECK(a2.rb.normalization[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
    const Setup g1(Family::gaussian, {}, 1);
    CHECK(g1.rb.size() == 0);
  }

  TEST_CASE("rotation fields are orthonormal") {
    for (const Setup& s : {Setup(Family::gaussian, {}, 3), Setup(Family::anisotropic_gaussian, {1, 2, 3}, 3),
                           Setup(Family::quartic_radial, {1.0}, 3, 16)}) {
      REQUIRE(s.rb.size() == 3);
      for (int r = 0; r < 3; ++r)
        for (int t = 0; t < 3; ++t)
          CHECK(std::abs(weighted_inner(s.rb.field(r), s.rb.field(t), s.q) - (r == t ? 1.0 : 0.0)) < 1e-10);
    }
  }

  TEST_CASE("P of the extremal field, a rotation and a constant") {
    const Setup g(Family::gaussian, {}, 2);
    const PolyVectorField u({Polynomial::constant(2, 1.0) - x(2, 1) * x(2, 1), x(2, 0) * x(2, 1)});
    CHECK(project_R(u, g.rb, g.q).coefficients.norm() < 1e-14);
    const FieldProjection pr = project_R(g.rb.field(0), g.rb, g.q);
    CHECK(pr.coefficients[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(project_R(PolyVectorField::constant(Eigen::Vector2d(1, -2)), g.rb, g.q).coefficients.norm() < 1e-14);
  }

  TEST_CASE("matrix projection onto constant antisymmetric matrices") {
    const Setup g(Family::gaussian, {}, 2);
    const PolyVectorField u({Polynomial::constant(2, 1.0) - x(2, 1) * x(2, 1), x(2, 0) * x(2, 1)});
    CHECK(project_Ma(differentiate(u).full, g.q).norm() < 1e-14);
    Eigen::Matrix2d a;
    a << 0, 2, -2, 0;
    CHECK((project_Ma(PolyMatrixField::constant(a), g.q) - a).norm() < 1e-14);
    Eigen::Matrix2d s;
    s << 1, 3, 3, -1;
    CHECK(project_Ma(PolyMatrixField::constant(s), g.q).norm() < 1e-14);
  }

  TEST_CASE("R_phi detection") {
    const Setup g2(Family::gaussian, {}, 2);
    CHECK(g2.dec.r_phi.size() == 1);
    CHECK(g2.dec.r_phi_c.empty());
    CHECK(g2.dec.m_phi.size() == 1);
    CHECK(g2.dec.m_phi_c.empty());
    const Setup a2(Family::anisotropic_gaussian, {1, 2}, 2);
    CHECK(a2.dec.r_phi.empty());
    CHECK(a2.dec.r_phi_c.size() == 1);
    // Gram eigenvalue <(grad phi . R)^2> for R = A x / sqrt(3): (1/2 - 1)^2 * 1 * 2 / 3.
    CHECK(a2.dec.gram_eigenvalues[0] == doctest::Approx(0.25 * 2.0 / 3.0).epsilon(1e-12));
    const Setup g3(Family::gaussian, {}, 3);
    CHECK(g3.dec.r_phi.size() == 3);
    const Setup q3(Family::quartic_radial, {1.0}, 3, 16);
    CHECK(q3.dec.r_phi.size() == 3);
    // s = (1, 1, 2): only rotations in the (x_1, x_2) plane preserve phi.
    const Setup a3(Family::anisotropic_gaussian, {1, 1, 2}, 3);
    CHECK(a3.dec.r_phi.size() == 1);
    CHECK(a3.dec.r_phi_c.size() == 2);
    CHECK(a3.dec.m_phi.size() + a3.dec.m_phi_c.size() == 3);
    CHECK_FALSE(a3.dec.ill_conditioned);
  }

  TEST_CASE("R_phi elements annihilate grad phi") {
    const Setup a3(Family::anisotropic_gaussian, {1, 1, 2}, 3);
    for (const auto& m : a3.dec.r_phi) {
      const PolyVectorField r = PolyVectorField::linear(m);
      const double norm = std::sqrt(weighted_inner(r, r, a3.q));
      const Eigen::VectorXd g = gradphi_dot_values(r, a3.q);
      CHECK(std::sqrt(a3.q.integrate(g.cwiseAbs2())) < 1e-8 * norm);
    }
  }

  TEST_CASE("detection is scale-robust") {
    for (double t : {0.01, 1.0, 100.0}) {
      CHECK(Setup(Family::anisotropic_gaussian, {t, 2 * t}, 2).dec.r_phi.size() == 0);
      CHECK(Setup(Family::anisotropic_gaussian, {t, t, 3 * t}, 3).dec.r_phi.size() == 1);
      CHECK(Setup(Family::quartic_radial, {t}, 2, 20).dec.r_phi.size() == 1);
    }
  }

  TEST_CASE("P_phi and its matrix counterpart") {
    const Setup g(Family::gaussian, {}, 2);
    const FieldProjection pg = project_Rphi(g.rb.field(0), g.dec, g.q);
    CHECK(std::abs(std::abs(pg.coefficients[0]) - 1.0) < 1e-13);
    const Setup a(Family::anisotropic_gaussian, {1, 2}, 2);
    CHECK(project_Rphi(a.rb.field(0), a.dec, a.q).coefficients.size() == 0);
    const Eigen::MatrixXd m = g.dec.m_phi[0] * 3.0;
    CHECK((project_Mphi(m, g.dec) - m).norm() < 1e-13);
    CHECK(project_Mphi(m, a.dec).norm() < 1e-14);
  }

  TEST_CASE("idempotence and Pythagoras on random fields") {
    const Setup s(Family::anisotropic_gaussian, {1, 1, 2}, 3);
    CoefficientStream rng(31);
    for (int k = 0; k < 50; ++k) {
      const PolyVectorField u = random_field(3, 2, rng);
      const PolyVectorField pu = project_R(u, s.rb, s.q).field;
      CHECK((project_R(pu, s.rb, s.q).field - pu).components()[0].pruned(1e-10).is_zero());
      const PolyVectorField pphi = project_Rphi(u, s.dec, s.q).field;
      const PolyVectorField pp = project_Rphi(pphi, s.dec, s.q).field;
      for (int i = 0; i < 3; ++i) CHECK((pp[i] - pphi[i]).pruned(1e-10).is_zero());
      const Eigen::MatrixXd pm = project_Ma(differentiate(u).full, s.q);
      CHECK((project_Ma(PolyMatrixField::constant(pm), s.q) - pm).norm() < 1e-10);

      const Eigen::VectorXd mu = mean(u, s.q);
      const PolyVectorField rest = u - PolyVectorField::constant(mu) - pu;
      const double lhs = weighted_inner(u, u, s.q);
      const double rhs = weighted_inner(rest, rest, s.q) + weighted_inner(pu, pu, s.q) + mu.squaredNorm();
      CHECK(std::abs(lhs - rhs) < 1e-9 * (1 + lhs));
      for (int r = 0; r < s.rb.size(); ++r) CHECK(std::abs(weighted_inner(rest, s.rb.field(r), s.q)) < 1e-10);
    }
  }

  TEST_CASE("mean antisymmetric part is controlled by grad phi") {
    const Setup s(Family::anisotropic_gaussian, {1, 2}, 2);
    double grad_sq = 0.0;
    for (Eigen::Index k = 0; k < s.q.size(); ++k) grad_sq += s.q.weights[k] * s.q.gradients.col(k).squaredNorm();
    CoefficientStream rng(4);
    for (int k = 0; k < 20; ++k) {
      const PolyVectorField u = random_field(2, 3, rng);
      const double lhs = project_Ma(differentiate(u).full, s.q).squaredNorm();
      CHECK(lhs <= grad_sq * weighted_inner(u, u, s.q) + 1e-12);
    }
  }
}
