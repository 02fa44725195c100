#include <cmath>

#include <doctest.h>

#include "korn/calculus.hpp"
#include "korn/error.hpp"
#include "oracles.hpp"

using namespace korn;

namespace {

Polynomial x(int d, int i) { return Polynomial::coordinate(d, i); }

PolyVectorField extremal() {
  return PolyVectorField({Polynomial::constant(2, 1.0) - x(2, 1) * x(2, 1), x(2, 0) * x(2, 1)});
}

bool same(const Polynomial& a, const Polynomial& b, double tol = 1e-12) {
  return (a - b).pruned(tol).is_zero();
}

Eigen::Matrix3d antisymmetric3() {
  Eigen::Matrix3d a;
  a << 0, -1, 2, 1, 0, -3, -2, 3, 0;
  return a;
}

}  // namespace

TEST_SUITE("calculus") {
  TEST_CASE("polynomial arithmetic and evaluation") {
    const Polynomial p = x(2, 0) * x(2, 0) * 3.0 - x(2, 1) + Polynomial::constant(2, 2.0);
    CHECK(p.degree() == 2);
    CHECK(p(Eigen::Vector2d(2, 5)) == doctest::Approx(12 - 5 + 2));
    CHECK(same(p.derivative(0), x(2, 0) * 6.0));
    const double shift[] = {1.0, 0.0};
    CHECK(p.translated(shift)(Eigen::Vector2d(1, 5)) == doctest::Approx(p(Eigen::Vector2d(2, 5))));
    CHECK((p - p).is_zero());
    CHECK(Polynomial(2).degree() == -1);
    CHECK(graded_monomials(3, 2).size() == 10);
  }

  TEST_CASE("node evaluator matches direct evaluation") {
    CoefficientStream rng(5);
    const Polynomial p = random_polynomial(3, 4, rng);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Random(3, 7);
    const NodeEvaluator ev(pts, 4);
    const Eigen::VectorXd v = ev.evaluate(p);
    for (int k = 0; k < 7; ++k) CHECK(v[k] == doctest::Approx(p(Eigen::VectorXd(pts.col(k)))).epsilon(1e-13));
  }

  TEST_CASE("coefficient stream is reproducible") {
    CoefficientStream a(42), b(42);
    for (int k = 0; k < 10; ++k) {
      const double va = a.next();
      CHECK(va == b.next());
      CHECK(std::abs(va) <= 1.0);
    }
  }

  TEST_CASE("differentials of an infinitesimal rotation") {
    const PolyVectorField u = PolyVectorField::linear(antisymmetric3());
    const Differential du = differentiate(u);
    CHECK(du.sym.max_abs_coefficient() == 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(same(du.antisym(i, j), Polynomial::constant(3, antisymmetric3()(i, j))));
  }

  TEST_CASE("differentials of the extremal field") {
    const Differential du = differentiate(extremal());
    const Polynomial x1 = x(2, 0), x2 = x(2, 1);
    CHECK(du.sym(0, 0).is_zero());
    CHECK(same(du.sym(0, 1), x2 * -0.5));
    CHECK(same(du.sym(1, 0), x2 * -0.5));
    CHECK(same(du.sym(1, 1), x1));
    CHECK(du.antisym(0, 0).is_zero());
    CHECK(same(du.antisym(0, 1), x2 * -1.5));
    CHECK(same(du.antisym(1, 0), x2 * 1.5));
    CHECK(du.sym.symmetry_consistent());
    CHECK(du.antisym.symmetry_consistent());
  }

  TEST_CASE("constant fields have zero differential") {
    const Differential du = differentiate(PolyVectorField::constant(Eigen::Vector3d(1, 2, 3)));
    CHECK(du.full.max_abs_coefficient() == 0.0);
  }

  TEST_CASE("Du = D^s u + D^a u coefficientwise") {
    CoefficientStream rng(9);
    for (int k = 0; k < 20; ++k) {
      const Differential du = differentiate(random_field(3, 4, rng));
      CHECK((du.full - (du.sym + du.antisym)).max_abs_coefficient() < 1e-14);
    }
  }

  TEST_CASE("weighted inner products") {
    const Potential p = build_potential(Family::gaussian, {}, 2);
    const Quadrature q = build_quadrature(p, 8);
    CHECK(weighted_inner(extremal(), extremal(), q) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(weighted_inner(x(2, 0), x(2, 0), q) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(weighted_inner(x(2, 0), x(2, 1), q)) < 1e-14);
    // 1 + |grad phi|^2 = 1 + |x|^2 so <x_1^2 (1 + |x|^2)> = 1 + 3 + 1.
    CHECK(weighted_inner(x(2, 0), x(2, 0), q, Weight::gradphi_sq) == doctest::Approx(5.0).epsilon(1e-13));
    CoefficientStream rng(3);
    const PolyVectorField a = random_field(2, 3, rng), b = random_field(2, 3, rng);
    CHECK(weighted_inner(a, b, q, Weight::gradphi) == doctest::Approx(weighted_inner(b, a, q, Weight::gradphi)));
    CHECK_THROWS_AS(weighted_inner(a, random_field(3, 1, rng), q), Error);
  }

  TEST_CASE("weighted inner product against Gaussian moment oracle") {
    const Potential p = build_potential(Family::anisotropic_gaussian, {1, 2}, 2);
    const Quadrature q = build_quadrature(p, 8);
    CoefficientStream rng(21);
    for (int k = 0; k < 5; ++k) {
      const Polynomial a = random_polynomial(2, 3, rng), b = random_polynomial(2, 3, rng);
      CHECK(weighted_inner(a, b, q) == doctest::Approx(oracle::gaussian_expectation(a * b, {1, 2})).epsilon(1e-12));
    }
  }

  TEST_CASE("phi-divergence") {
    const Potential p = build_potential(Family::gaussian, {}, 2);
    const Quadrature q = build_quadrature(p, 8);
    // u = grad(x_1^2) gives Delta_phi f = 2 - 2 x_1^2.
    const PolyVectorField grad({x(2, 0) * 2.0, Polynomial(2)});
    const Polynomial dphi = phi_divergence(grad, p);
    CHECK(same(dphi, Polynomial::constant(2, 2.0) - x(2, 0) * x(2, 0) * 2.0));
    Eigen::Matrix2d a;
    a << 0, -1, 1, 0;
    CHECK(phi_divergence(PolyVectorField::linear(a), p).pruned(1e-14).is_zero());
    // <grad f, u> = -<f, div_phi u> for f = x_1 x_2 and u = (x_2, 0).
    const PolyVectorField u({x(2, 1), Polynomial(2)});
    const Polynomial f = x(2, 0) * x(2, 1);
    const double lhs = weighted_inner(PolyVectorField({f.derivative(0), f.derivative(1)}), u, q);
    const double rhs = -weighted_inner(f, phi_divergence(u, p), q);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    CHECK((phi_divergence_values(u, q) - node_values(phi_divergence(u, p), q)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("phi-divergence adjointness for the quartic potential") {
    const Potential p = build_potential(Family::quartic_radial, {1.0}, 2);
    const Quadrature q = build_quadrature(p, 24);
    CoefficientStream rng(8);
    const Polynomial f = random_polynomial(2, 2, rng);
    const PolyVectorField u = random_field(2, 2, rng);
    const double lhs = weighted_inner(PolyVectorField({f.derivative(0), f.derivative(1)}), u, q);
    const double rhs = -q.integrate(node_values(f, q).cwiseProduct(phi_divergence_values(u, q)));
    CHECK(std::abs(lhs - rhs) < 1e-4 * (1 + std::abs(lhs)));
  }

  TEST_CASE("Schwarz residual vanishes identically") {
    CHECK(schwarz_vanishes(schwarz_residual(extremal())));
    CHECK(schwarz_residual(extremal()).size() == 8);
    CHECK(schwarz_vanishes(schwarz_residual(PolyVectorField::affine(antisymmetric3(), Eigen::Vector3d(1, 2, 3)))));
    CoefficientStream rng(17);
    for (int d : {2, 3})
      for (int k = 0; k < 100; ++k) {
        const auto res = schwarz_residual(random_field(d, 1 + k % 6, rng));
        CHECK(res.size() == static_cast<std::size_t>(d * d * d));
        CHECK(schwarz_vanishes(res));
      }
  }

  TEST_CASE("first-order identities on Gaussian families") {
    CoefficientStream rng(23);
    for (const auto& p : {build_potential(Family::gaussian, {}, 2), build_potential(Family::gaussian, {}, 3),
                          build_potential(Family::anisotropic_gaussian, {1, 2}, 2),
                          build_potential(Family::anisotropic_gaussian, {0.5, 1, 3}, 3)}) {
      const Quadrature q = build_quadrature(p, 8);
      for (int k = 0; k < 20; ++k) {
        const PolyVectorField u = random_field(p.dimension(), 3, rng);
        const IdentityTerms t = identity_terms(u, q);
        CHECK(std::abs(t.full - t.sym - t.antisym) < 1e-10 * (1 + t.full));
        CHECK(std::abs(t.first_lhs() - t.first_rhs()) < 1e-10 * (1 + t.first_rhs()));
        CHECK(t.second_lhs() <= t.second_rhs() + 1e-10 * (1 + t.second_rhs()));
      }
    }
  }

  TEST_CASE("extremal field identity terms") {
    const Quadrature q = build_quadrature(build_potential(Family::gaussian, {}, 2), 6);
    const IdentityTerms t = identity_terms(extremal(), q);
    CHECK(t.sym == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(t.antisym == doctest::Approx(4.5).epsilon(1e-13));
    CHECK(t.full == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(t.hess_form == doctest::Approx(3.0).epsilon(1e-13));
  }
}
