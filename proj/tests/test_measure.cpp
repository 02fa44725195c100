#include <cmath>

#include <doctest.h>

#include "korn/error.hpp"
#include "korn/measure.hpp"
#include "oracles.hpp"

using namespace korn;

namespace {

Quadrature rule(Family f, std::vector<double> params, int d, int order) {
  return build_quadrature(build_potential(f, std::move(params), d), order);
}

double max_fd_error(const Potential& p, const Eigen::VectorXd& x, double h) {
  const int d = p.dimension();
  double err = 0.0;
  const Eigen::VectorXd g = p.gradient(x);
  const Eigen::MatrixXd hs = p.hessian(x);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i) * h;
    err = std::max(err, std::abs((p.value(x + e) - p.value(x - e)) / (2 * h) - g[i]));
    const Eigen::VectorXd dg = (p.gradient(x + e) - p.gradient(x - e)) / (2 * h);
    err = std::max(err, (dg - hs.col(i)).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("gaussian potential carries the normalizing constant") {
    const Potential p = build_potential(Family::gaussian, {}, 2);
    CHECK(p.value(Eigen::Vector2d::Zero()) == doctest::Approx(std::log(2 * M_PI)).epsilon(1e-14));
    CHECK(p.value(Eigen::Vector2d(1, 2)) == doctest::Approx(2.5 + std::log(2 * M_PI)).epsilon(1e-14));
    const Quadrature q = build_quadrature(p, 10);
    CHECK(std::abs(q.weights.sum() - 1.0) < 1e-12);
    CHECK((q.nodes * q.weights).norm() < 1e-12);
  }

  TEST_CASE("anisotropic potential normalization") {
    const Potential p = build_potential(Family::anisotropic_gaussian, {1, 2}, 2);
    CHECK(p.value(Eigen::Vector2d::Zero()) == doctest::Approx(0.5 * std::log(8 * M_PI * M_PI)).epsilon(1e-14));
    CHECK(p.value(Eigen::Vector2d(2, 2)) ==
          doctest::Approx(2.0 + 1.0 + 0.5 * std::log(8 * M_PI * M_PI)).epsilon(1e-14));
  }

  TEST_CASE("one-dimensional gaussian has mean zero and unit variance") {
    const Quadrature q = rule(Family::gaussian, {}, 1, 8);
    CHECK(std::abs(moment(q, {1})) < 1e-14);
    CHECK(moment(q, {2}) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("gaussian moments are exact") {
    const Quadrature q = rule(Family::gaussian, {}, 2, 10);
    CHECK(q.exact);
    CHECK(q.exactness_degree == 19);
    CHECK(std::abs(moment(q, {2, 0}) - 1.0) < 1e-12);
    CHECK(std::abs(moment(q, {2, 2}) - 1.0) < 1e-12);
    CHECK(std::abs(moment(q, {1, 1})) < 1e-14);
    for (const auto& m : graded_monomials(2, 12))
      CHECK(std::abs(moment(q, m) - oracle::gaussian_moment(m, {1, 1})) < 1e-9 * (1 + oracle::gaussian_moment(m, {1, 1})));
  }

  TEST_CASE("anisotropic moments match closed forms") {
    const Quadrature q = rule(Family::anisotropic_gaussian, {1, 2}, 2, 8);
    CHECK(moment(q, {0, 2}) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(moment(q, {4, 2}) == doctest::Approx(oracle::gaussian_moment({4, 2}, {1, 2})).epsilon(1e-12));
    CHECK((q.covariance() - Eigen::Matrix2d(Eigen::Vector2d(1, 2).asDiagonal())).norm() < 1e-12);
  }

  TEST_CASE("moment beyond the exactness degree names the required order") {
    const Quadrature q = rule(Family::gaussian, {}, 2, 4);
    CHECK_THROWS_AS(moment(q, {8, 0}), Error);
  }

  TEST_CASE("quartic normalization matches the radial integral") {
    const Potential p = build_potential(Family::quartic_radial, {1.0}, 2);
    const Quadrature q = build_quadrature(p, 40);
    CHECK(q.mass_defect < 1e-4);
    const double z = oracle::radial_mass(2, 1.0, 4.0);
    CHECK(z == doctest::Approx(oracle::radial_mass_closed(2, 1.0, 4.0)).epsilon(1e-10));
    CHECK(p.offset() == doctest::Approx(std::log(z)).epsilon(1e-8));
    // <|x|^2> against the Gamma-function oracle.
    const double r2 = moment(q, {2, 0}) + moment(q, {0, 2});
    CHECK(r2 == doctest::Approx(oracle::radial_moment(2, 1.0, 4.0, 2.0)).epsilon(1e-6));
  }

  TEST_CASE("quartic with gamma = 3 and d = 3") {
    const Potential p = build_potential(Family::quartic_radial, {0.5, 3.0}, 3);
    CHECK(p.offset() == doctest::Approx(std::log(oracle::radial_mass_closed(3, 0.5, 3.0))).epsilon(1e-6));
  }

  TEST_CASE("user-supplied polynomial is normalized and centred") {
    PotentialSpec spec;
    spec.family = Family::user_supplied;
    spec.dimension = 2;
    Polynomial phi(2);
    phi.add_term({2, 0}, 0.5);
    phi.add_term({0, 2}, 0.5);
    phi.add_term({1, 0}, 1.0);  // centre moves to x_1 = -1
    spec.polynomial = phi;
    const Potential p = build_potential(spec);
    CHECK(p.center_shift()[0] == doctest::Approx(-1.0).epsilon(1e-10));
    const Quadrature q = build_quadrature(p, 12);
    CHECK(std::abs(moment(q, {1, 0})) < 1e-10);
    CHECK(moment(q, {2, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.value(Eigen::Vector2d::Zero()) == doctest::Approx(std::log(2 * M_PI)).epsilon(1e-9));
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(family_from_string("cubic"), Error);
    CHECK_THROWS_AS(build_potential(Family::quartic_radial, {1.0, 0.5}, 2), Error);
    CHECK_THROWS_AS(build_potential(Family::anisotropic_gaussian, {1.0, -2.0}, 2), Error);
    CHECK_THROWS_AS(build_potential(Family::anisotropic_gaussian, {1.0}, 2), Error);
    CHECK_THROWS_AS(build_potential(Family::gaussian, {}, 0), Error);
    PotentialSpec spec;
    spec.family = Family::user_supplied;
    spec.dimension = 1;
    Polynomial flat(1);
    flat.add_term({2}, -1.0);
    spec.polynomial = flat;
    CHECK_THROWS_AS(build_potential(spec), Error);
    CHECK_THROWS_AS(build_quadrature(build_potential(Family::quartic_radial, {1.0}, 2), 4), Error);
  }

  TEST_CASE("analytic derivatives agree with central differences") {
    CoefficientStream rng(11);
    const std::vector<Potential> ps = {
        build_potential(Family::gaussian, {}, 3), build_potential(Family::anisotropic_gaussian, {1, 2, 3}, 3),
        build_potential(Family::quartic_radial, {1.0}, 3), build_potential(Family::quartic_radial, {1.0, 3.0}, 3),
        build_potential(Family::perturbed_gaussian, {0.1}, 3)};
    for (const auto& p : ps)
      for (int k = 0; k < 5; ++k) {
        const Eigen::Vector3d x(rng.next() * 2, rng.next() * 2, rng.next() * 2);
        const double e1 = max_fd_error(p, x, 1e-3), e2 = max_fd_error(p, x, 5e-4);
        // O(h^2): halving h cuts the error by about four.
        CHECK(e1 < 1e-4);
        CHECK(e2 < 0.3 * e1 + 1e-9);
      }
  }

  TEST_CASE("normalization, centering and the gradient-mass identity for every family") {
    struct Case {
      Family f;
      std::vector<double> params;
      int d;
      int order;
      double tol;
    };
    for (const Case& c : std::vector<Case>{{Family::gaussian, {}, 2, 8, 1e-12},
                                           {Family::anisotropic_gaussian, {1, 2}, 2, 8, 1e-12},
                                           {Family::anisotropic_gaussian, {1, 2, 3}, 3, 8, 1e-12},
                                           {Family::quartic_radial, {1.0}, 2, 24, 1e-5},
                                           {Family::quartic_radial, {1.0}, 3, 20, 1e-4},
                                           {Family::perturbed_gaussian, {0.05}, 2, 24, 1e-5}}) {
      const Potential p = build_potential(c.f, c.params, c.d);
      const Quadrature q = build_quadrature(p, c.order);
      CHECK(std::abs(q.weights.sum() - 1.0) < 1e-10);
      CHECK((q.weights.array() > 0).all());
      CHECK((q.nodes * q.weights).cwiseAbs().maxCoeff() < 1e-10);
      double grad_sq = 0.0, lap = 0.0;
      for (Eigen::Index k = 0; k < q.size(); ++k) {
        grad_sq += q.weights[k] * q.gradients.col(k).squaredNorm();
        lap += q.weights[k] * q.hessian(k).trace();
      }
      CHECK(std::abs(grad_sq - lap) <= c.tol * lap);
      CHECK(grad_sq <= 3.0 * estimate_regularity_constants(p, q).c_phi);
    }
  }

  TEST_CASE("gaussian regularity constants") {
    const Potential p2 = build_potential(Family::gaussian, {}, 2);
    const RegularityConstants r2 = estimate_regularity_constants(p2, build_quadrature(p2, 8));
    CHECK(r2.c_phi == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(r2.c_phi_prime == doctest::Approx(4 * std::sqrt(18.0)).epsilon(1e-14));
    CHECK(r2.method == ConstantMethod::closed_form);
    CHECK(r2.certified);

    const Potential p1 = build_potential(Family::gaussian, {}, 1);
    const RegularityConstants r1 = estimate_regularity_constants(p1, build_quadrature(p1, 8));
    CHECK(r1.c_phi > 8.0);
    CHECK(r1.c_phi == doctest::Approx(8.0 * (1 + 1e-9)).epsilon(1e-15));
    CHECK(r1.c_phi_prime == doctest::Approx(8 * std::sqrt(2.0)).epsilon(1e-8));
  }

  TEST_CASE("regularity inequalities hold at every node") {
    for (const auto& p : {build_potential(Family::gaussian, {}, 3), build_potential(Family::anisotropic_gaussian, {1, 2}, 2),
                          build_potential(Family::quartic_radial, {1.0}, 2),
                          build_potential(Family::perturbed_gaussian, {0.2}, 2)}) {
      const Quadrature q = build_quadrature(p, p.envelope_exact() ? 10 : 24);
      const RegularityConstants rc = estimate_regularity_constants(p, q);
      CHECK(rc.c_phi > 8.0);
      CHECK(rc.c_phi_prime >= rc.c_phi);
      for (Eigen::Index k = 0; k < q.size(); ++k)
        CHECK(regularity_inequalities_hold(rc, q.gradients.col(k), q.hessian(k)));
    }
  }

  TEST_CASE("quartic node-supremum constants survive a dense grid") {
    const Potential p = build_potential(Family::quartic_radial, {1.0}, 2);
    const RegularityConstants rc = estimate_regularity_constants(p, build_quadrature(p, 24));
    CHECK(rc.method == ConstantMethod::node_supremum);
    CHECK_FALSE(rc.certified);
    int failures = 0;
    for (int i = 0; i < 200; ++i)
      for (int j = 0; j < 200; ++j) {
        const Eigen::Vector2d x(-8.0 + 16.0 * i / 199.0, -8.0 + 16.0 * j / 199.0);
        if (!regularity_inequalities_hold(rc, p.gradient(x), p.hessian(x))) ++failures;
      }
    CHECK(failures == 0);
  }
}
