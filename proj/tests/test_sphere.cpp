#include <doctest.h>

#include <cmath>

#include "hbm/basis.hpp"
#include "hbm/sphere.hpp"
#include "oracles.hpp"

using namespace hbm;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("circle grid: uniform rule, antipodal closure") {
  auto grid = build_grid(2, 256);
  CHECK(grid->node_count() == 256);
  CHECK(grid->degree == 127);
  for (int a = 0; a < grid->node_count(); ++a) {
    CHECK(grid->weights[a] == doctest::Approx(2.0 * kPi / 256).epsilon(1e-15));
    CHECK(std::abs(grid->nodes.row(a).norm() - 1.0) <= 1e-14);
    const int b = grid->antipode[a];
    CHECK(grid->antipode[b] == a);
    CHECK((grid->nodes.row(b) + grid->nodes.row(a)).norm() == 0.0);  // exact
  }
  CHECK(std::abs(grid->total_measure() - 2.0 * kPi) <= 1e-12);
}

TEST_CASE("sphere grid: weights, closure, frames") {
  auto grid = build_grid(3, 32);
  CHECK(grid->node_count() == 32 * 64);
  CHECK(std::abs(grid->total_measure() - 4.0 * kPi) <= 1e-12);
  for (int a = 0; a < grid->node_count(); ++a) {
    CHECK(std::abs(grid->nodes.row(a).norm() - 1.0) <= 1e-14);
    const int b = grid->antipode[a];
    CHECK(grid->antipode[b] == a);
    CHECK((grid->nodes.row(b) + grid->nodes.row(a)).norm() == 0.0);
    // orthonormal frame tangent to the node
    CHECK(std::abs(grid->frames[0].row(a).dot(grid->nodes.row(a))) <= 1e-14);
    CHECK(std::abs(grid->frames[1].row(a).dot(grid->nodes.row(a))) <= 1e-14);
    CHECK(std::abs(grid->frames[0].row(a).dot(grid->frames[1].row(a))) <= 1e-14);
    CHECK(std::abs(grid->frames[0].row(a).norm() - 1.0) <= 1e-14);
  }
}

TEST_CASE("build_grid rejects bad input") {
  CHECK_THROWS_AS(build_grid(4, 32), input_error);
  CHECK_THROWS_AS(build_grid(3, 31), input_error);
  CHECK_THROWS_AS(build_grid(2, 6), input_error);
}

TEST_CASE("quadrature: exact Gram matrix of the harmonic basis") {
  // brute-force orthonormality oracle, n = 3
  auto grid = build_grid(3, 32);
  auto basis = build_basis_table(grid, grid->degree);
  Eigen::MatrixXd G = basis.values.transpose() * grid->weights.asDiagonal() * basis.values;
  G -= Eigen::MatrixXd::Identity(basis.count(), basis.count());
  CHECK(G.cwiseAbs().maxCoeff() <= 1e-10);

  auto circle = build_grid(2, 64);
  auto cb = build_basis_table(circle, circle->degree);
  Eigen::MatrixXd Gc = cb.values.transpose() * circle->weights.asDiagonal() * cb.values;
  Gc -= Eigen::MatrixXd::Identity(cb.count(), cb.count());
  CHECK(Gc.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("integrate: constants and moments") {
  auto g2 = build_grid(2, 64);
  CHECK(integrate(*g2, ScalarField(g2, Eigen::VectorXd::Ones(g2->node_count()))) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-14));

  auto g3 = build_grid(3, 16);
  CHECK(integrate(*g3, ScalarField(g3, Eigen::VectorXd::Ones(g3->node_count()))) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-14));
  Eigen::VectorXd t1sq(g3->node_count());
  for (int a = 0; a < g3->node_count(); ++a) t1sq[a] = g3->nodes(a, 0) * g3->nodes(a, 0);
  CHECK(integrate(*g3, ScalarField(g3, t1sq)) == doctest::Approx(4.0 * kPi / 3).epsilon(1e-13));

  auto other = build_grid(2, 64);
  CHECK_THROWS_AS(integrate(*g2, ScalarField(other, Eigen::VectorXd::Ones(64))),
                  input_error);
}

TEST_CASE("differentiate: constants and exact trigonometric modes") {
  auto grid = build_grid(2, 64);
  const int N = grid->node_count();

  auto dc = differentiate(*grid, ScalarField(grid, Eigen::VectorXd::Constant(N, 3.5)));
  CHECK(dc.grad.comp.cwiseAbs().maxCoeff() <= 1e-11);
  CHECK(dc.hess.comp.cwiseAbs().maxCoeff() <= 1e-10);

  Eigen::VectorXd f(N);
  for (int a = 0; a < N; ++a) f[a] = std::cos(2.0 * grid->phis[a]);
  auto d = differentiate(*grid, ScalarField(grid, f));
  for (int a = 0; a < N; ++a) {
    CHECK(std::abs(d.hess.comp(a, 0) + 4.0 * f[a]) <= 1e-10);
    CHECK(std::abs(d.grad.comp(a, 0) + 2.0 * std::sin(2.0 * grid->phis[a])) <= 1e-10);
  }
}

TEST_CASE("differentiate on S^2: z^2 against the finite-difference oracle") {
  auto grid = build_grid(3, 16);
  const int N = grid->node_count();
  Eigen::VectorXd f(N);
  for (int a = 0; a < N; ++a) f[a] = grid->nodes(a, 2) * grid->nodes(a, 2);
  auto d = differentiate(*grid, ScalarField(grid, f));

  auto fun = [](const Eigen::VectorXd& p) { return p[2] * p[2]; };
  const double step = 1e-4;
  for (int a = 0; a < N; a += 97) {
    const Eigen::VectorXd th = grid->nodes.row(a).transpose();
    const Eigen::VectorXd e0 = grid->frames[0].row(a).transpose();
    const Eigen::VectorXd e1 = grid->frames[1].row(a).transpose();
    CHECK(std::abs(d.grad.comp(a, 0) - oracles::sphere_gradient(fun, th, e0, step)) <= 1e-6);
    CHECK(std::abs(d.grad.comp(a, 1) - oracles::sphere_gradient(fun, th, e1, step)) <= 1e-6);
    CHECK(std::abs(d.hess.comp(a, 0) - oracles::sphere_hessian_diag(fun, th, e0, step)) <=
          1e-6);
    CHECK(std::abs(d.hess.comp(a, 1) - oracles::sphere_hessian(fun, th, e0, e1, step)) <=
          1e-6);
    CHECK(std::abs(d.hess.comp(a, 2) - oracles::sphere_hessian_diag(fun, th, e1, step)) <=
          1e-6);
    // laplacian of z^2 is 2 - 6 z^2
    const double z2 = th[2] * th[2];
    CHECK(std::abs(d.hess.trace(a) - (2.0 - 6.0 * z2)) <= 1e-10);
  }
}

TEST_CASE("differentiate reports unresolvable input") {
  auto grid = build_grid(2, 32);
  const int N = grid->node_count();
  Eigen::VectorXd f(N);
  for (int a = 0; a < N; ++a) f[a] = std::cos(14.0 * grid->phis[a]);
  CHECK_THROWS_AS(differentiate(*grid, ScalarField(grid, f)), resolution_error);
  // permissive mode still reports
  auto d = differentiate(*grid, ScalarField(grid, f), DiffOptions{1e-8, false});
  CHECK(d.residual > 1e-8);
}

TEST_CASE("divergence theorem: integral of the laplacian vanishes") {
  for (int dim : {2, 3}) {
    auto grid = build_grid(dim, dim == 2 ? 64 : 16);
    auto f = random_band_limited(grid, 8, 20260809u + dim);
    auto lap = laplacian(*grid, f);
    CHECK(std::abs(integrate(*grid, lap)) <= 1e-10);
  }
}

TEST_CASE("parity split: projections, exactness, idempotence") {
  auto grid = build_grid(2, 32);
  const int N = grid->node_count();

  Eigen::VectorXd odd_in(N), even_in(N), mix(N);
  for (int a = 0; a < N; ++a) {
    odd_in[a] = grid->nodes(a, 0);                          // theta_1
    even_in[a] = grid->nodes(a, 0) * grid->nodes(a, 0);     // theta_1^2
    mix[a] = odd_in[a] + even_in[a];
  }
  auto [e1, o1] = parity_split(*grid, ScalarField(grid, odd_in));
  CHECK(e1.values.cwiseAbs().maxCoeff() == 0.0);
  auto [e2, o2] = parity_split(*grid, ScalarField(grid, even_in));
  CHECK(o2.values.cwiseAbs().maxCoeff() == 0.0);
  auto [e3, o3] = parity_split(*grid, ScalarField(grid, mix));
  // recovery of the parts is exact up to one rounding of the averaging
  CHECK((e3.values - even_in).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((o3.values - odd_in).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((e3.values + o3.values - mix).cwiseAbs().maxCoeff() <= 1e-15);

  auto [ee, eo] = parity_split(*grid, e3);
  CHECK((ee.values - e3.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(eo.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random_band_limited is deterministic and parity-clean") {
  auto grid = build_grid(3, 16);
  auto f1 = random_band_limited(grid, 6, 42, Parity::even);
  auto f2 = random_band_limited(grid, 6, 42, Parity::even);
  CHECK((f1.values - f2.values).cwiseAbs().maxCoeff() == 0.0);
  auto [e, o] = parity_split(*grid, f1);
  CHECK(o.values.cwiseAbs().maxCoeff() <= 1e-14);
  auto g = random_band_limited(grid, 6, 43, Parity::even);
  CHECK((f1.values - g.values).cwiseAbs().maxCoeff() > 1e-6);
}
