#include <doctest.h>

#include <cmath>

#include "hbm/body.hpp"
#include "oracles.hpp"

using namespace hbm;

TEST_CASE("support: closed forms") {
  auto ball = BodySpec::make_ball(3, 1.0);
  CHECK(support(ball, Eigen::Vector3d(0, 0, 1)) == doctest::Approx(1.0).epsilon(1e-15));

  auto ell = BodySpec::make_ellipsoid(Eigen::Vector2d(1, 2));
  CHECK(support(ell, Eigen::Vector2d(0, 1)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(support(ell, Eigen::Vector2d(1, 0)) == doctest::Approx(1.0).epsilon(1e-15));

  auto lp = BodySpec::make_lp_ball(3, 4.0);
  CHECK(support(lp, Eigen::Vector3d(1, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("support: linear equivariance") {
  auto ell = BodySpec::make_ellipsoid(Eigen::Vector2d(1, 2));
  Eigen::Matrix2d m;
  m << 1.2, 0.3, -0.1, 0.8;
  auto mapped = ell.with_ell(m);
  for (double phi : {0.1, 1.3, 2.9, 4.4}) {
    Eigen::Vector2d th(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d y = m.transpose() * th;
    const double hy = y.norm() * support(ell, Eigen::Vector2d(y.normalized()));
    CHECK(support(mapped, th) == doctest::Approx(hy).epsilon(1e-14));
  }
}

TEST_CASE("gauge: closed forms and homogeneity") {
  auto ell = BodySpec::make_ellipsoid(Eigen::Vector2d(1, 2));
  CHECK(gauge(ell, Eigen::Vector2d(0, 2)) == doctest::Approx(1.0).epsilon(1e-15));

  auto ball = BodySpec::make_ball(3, 2.5);
  CHECK(gauge(ball, Eigen::Vector3d(3, 0, 4)) == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(gauge(ball, Eigen::Vector3d(0, 0, 0)), input_error);

  auto harm = BodySpec::make_harmonic(2, 1.0, {{2, 0.1}, {4, 0.03}});
  for (double t : {0.5, 2.0, 7.0}) {
    Eigen::Vector2d x(0.3, -1.1);
    CHECK(gauge(harm, (t * x).eval()) ==
          doctest::Approx(t * gauge(harm, x)).epsilon(1e-13));
  }
}

TEST_CASE("gauge: boundary consistency with the sampled boundary map") {
  // gauge(X_K(theta)) = 1 where X_K comes from numeric derivatives of h
  auto grid2 = build_grid(2, 128);
  auto harm = BodySpec::make_harmonic(2, 1.0, {{2, 0.08}, {6, 0.005}});
  auto field = sample(harm, grid2);
  REQUIRE(validate(field).pass);
  for (int a = 0; a < grid2->node_count(); a += 7) {
    CHECK(std::abs(gauge(harm, field.boundary_point(a)) - 1.0) <= 1e-8);
  }

  auto grid3 = build_grid(3, 16);
  auto harm3 = BodySpec::make_harmonic(3, 1.0, {{2, 0.08}});
  auto field3 = sample(harm3, grid3);
  for (int a = 0; a < grid3->node_count(); a += 53) {
    CHECK(std::abs(gauge(harm3, field3.boundary_point(a)) - 1.0) <= 1e-8);
  }
}

TEST_CASE("gauge and support are dual on ellipsoids under maps") {
  auto ell = BodySpec::make_ellipsoid(Eigen::Vector3d(1, 1.5, 2));
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = 0.4;
  m(2, 0) = -0.2;
  auto mapped = ell.with_ell(m);
  // boundary points have gauge 1
  auto grid = build_grid(3, 16);
  auto field = sample(mapped, grid);
  for (int a = 0; a < grid->node_count(); a += 101)
    CHECK(std::abs(gauge(mapped, field.boundary_point(a)) - 1.0) <= 1e-9);
}

TEST_CASE("sample: ball and ellipse curvature radii") {
  auto grid = build_grid(2, 128);
  auto ball = sample(BodySpec::make_ball(2, 1.0), grid);
  CHECK((ball.h.array() - 1.0).abs().maxCoeff() <= 1e-14);
  for (int a = 0; a < grid->node_count(); ++a)
    CHECK(std::abs(ball.d2h(a, 0) - 1.0) <= 1e-10);

  auto ell = sample(BodySpec::make_ellipsoid(Eigen::Vector2d(1, 2)), grid);
  // radius of curvature b^2/a = 4 at phi = 0
  CHECK(ell.d2h(0, 0) == doctest::Approx(4.0).epsilon(1e-9));
  // and a^2/b = 0.5 at phi = pi/2
  CHECK(ell.d2h(grid->node_count() / 4, 0) == doctest::Approx(0.5).epsilon(1e-9));

  // duality at the boundary: <X(theta), theta> = h
  for (int a = 0; a < grid->node_count(); a += 11)
    CHECK(std::abs(ell.boundary_point(a).dot(grid->nodes.row(a).transpose()) - ell.h[a]) <=
          1e-12);
}

TEST_CASE("sample: evenness of harmonic perturbations is exact") {
  auto grid = build_grid(2, 64);
  auto field = sample(BodySpec::make_harmonic(2, 1.0, {{2, 0.05}}), grid);
  for (int a = 0; a < grid->node_count(); ++a)
    CHECK(std::abs(field.h[a] - field.h[grid->antipode[a]]) <= 1e-12);
}

TEST_CASE("validate: convexity verdicts") {
  auto grid = build_grid(2, 64);
  auto ball = sample(BodySpec::make_ball(2, 1.0), grid);
  auto vb = validate(ball);
  CHECK(vb.pass);
  CHECK(vb.min_h == doctest::Approx(1.0));
  CHECK(vb.min_d2h_eig == doctest::Approx(1.0));

  auto ok = validate(sample(BodySpec::make_ellipsoid(Eigen::Vector2d(1, 2)), grid));
  CHECK(ok.pass);

  auto bad = validate(sample(BodySpec::make_harmonic(2, 1.0, {{2, 10.0}}), grid));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("spec construction rejects invalid parameters") {
  CHECK_THROWS_AS(BodySpec::make_ball(5, 1.0), input_error);
  CHECK_THROWS_AS(BodySpec::make_ball(2, -1.0), input_error);
  CHECK_THROWS_AS(BodySpec::make_lp_ball(2, 2.0), input_error);
  CHECK_THROWS_AS(BodySpec::make_harmonic(2, 1.0, {{3, 0.1}}), input_error);
  CHECK_THROWS_AS(BodySpec::make_harmonic(2, 1.0, {{0, 0.1}}), input_error);
  Eigen::Matrix2d sing = Eigen::Matrix2d::Zero();
  CHECK_THROWS_AS(BodySpec::make_ball(2, 1.0).with_ell(sing), input_error);
}

TEST_CASE("lp-ball support matches the dual-norm finite-difference gradient") {
  auto lp = BodySpec::make_lp_ball(2, 4.0, 1.3);
  // h is 1-homogeneous: <grad h(theta), theta> = h(theta)
  Eigen::Vector2d th(std::cos(0.7), std::sin(0.7));
  const double h0 = support(lp, th);
  const double step = 1e-6;
  Eigen::Vector2d g;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d p = th, m = th;
    p[i] += step;
    m[i] -= step;
    const double hp = p.norm() * support(lp, Eigen::Vector2d(p.normalized()));
    const double hm = m.norm() * support(lp, Eigen::Vector2d(m.normalized()));
    g[i] = (hp - hm) / (2 * step);
  }
  CHECK(g.dot(th) == doctest::Approx(h0).epsilon(1e-8));
}
