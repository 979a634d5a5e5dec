#include "hbm/sphere.hpp"

#include <cmath>
#include <string>

#include "transform.hpp"

namespace hbm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Eigen::VectorXd GradientField::ambient(int a) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->dim);
  for (int i = 0; i < grid->tangent_dim(); ++i)
    v += comp(a, i) * grid->frames[i].row(a).transpose();
  return v;
}

GridPtr build_grid(int dim, int resolution) {
  if (dim != 2 && dim != 3) throw input_error("build_grid: dimension must be 2 or 3");
  if (resolution < 8) throw input_error("build_grid: resolution must be >= 8");
  if (resolution % 2 != 0)
    throw input_error("build_grid: resolution must be even for antipodal closure");

  auto grid = std::make_shared<SphereGrid>();
  grid->dim = dim;
  grid->resolution = resolution;

  if (dim == 2) {
    const int m = resolution;
    grid->degree = m / 2 - 1;
    grid->nodes.resize(m, 2);
    grid->weights = Eigen::VectorXd::Constant(m, 2.0 * kPi / m);
    grid->phis.resize(m);
    grid->antipode.resize(m);
    grid->frames[0].resize(m, 2);
    for (int a = 0; a < m; ++a) grid->phis[a] = 2.0 * kPi * a / m;
    for (int a = 0; a < m / 2; ++a) {
      grid->nodes(a, 0) = std::cos(grid->phis[a]);
      grid->nodes(a, 1) = std::sin(grid->phis[a]);
      grid->nodes.row(a + m / 2) = -grid->nodes.row(a);
    }
    for (int a = 0; a < m; ++a) {
      grid->antipode[a] = (a + m / 2) % m;
      grid->frames[0](a, 0) = -std::sin(grid->phis[a]);
      grid->frames[0](a, 1) = std::cos(grid->phis[a]);
    }
  } else {
    const int nlat = resolution, nlon = 2 * resolution;
    grid->n_lat = nlat;
    grid->n_lon = nlon;
    grid->degree = nlat - 1;
    detail::gauss_legendre(nlat, grid->ring_x, grid->ring_w);
    grid->phis.resize(nlon);
    for (int j = 0; j < nlon; ++j) grid->phis[j] = 2.0 * kPi * j / nlon;

    const int N = nlat * nlon;
    grid->nodes.resize(N, 3);
    grid->weights.resize(N);
    grid->antipode.resize(N);
    grid->frames[0].resize(N, 3);
    grid->frames[1].resize(N, 3);

    // upper hemisphere rings by formula, lower half as exact negations
    for (int i = nlat / 2; i < nlat; ++i) {
      const double x = grid->ring_x[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
      for (int j = 0; j < nlon; ++j) {
        const int a = i * nlon + j;
        grid->nodes(a, 0) = st * std::cos(grid->phis[j]);
        grid->nodes(a, 1) = st * std::sin(grid->phis[j]);
        grid->nodes(a, 2) = x;
      }
    }
    for (int i = 0; i < nlat / 2; ++i)
      for (int j = 0; j < nlon; ++j) {
        const int a = i * nlon + j;
        const int b = (nlat - 1 - i) * nlon + (j + nlon / 2) % nlon;
        grid->nodes.row(a) = -grid->nodes.row(b);
      }
    for (int i = 0; i < nlat; ++i) {
      const double x = grid->ring_x[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
      for (int j = 0; j < nlon; ++j) {
        const int a = i * nlon + j;
        grid->weights[a] = grid->ring_w[i] * (2.0 * kPi / nlon);
        grid->antipode[a] = (nlat - 1 - i) * nlon + (j + nlon / 2) % nlon;
        const double cp = std::cos(grid->phis[j]), sp = std::sin(grid->phis[j]);
        // e_theta points towards decreasing x (theta measured from +z)
        grid->frames[0](a, 0) = x * cp;
        grid->frames[0](a, 1) = x * sp;
        grid->frames[0](a, 2) = -st;
        grid->frames[1](a, 0) = -sp;
        grid->frames[1](a, 1) = cp;
        grid->frames[1](a, 2) = 0.0;
      }
    }
  }

  grid->transform = std::make_shared<const detail::HarmonicTransform>(*grid);
  return grid;
}

namespace detail {
void check_same_grid(const SphereGrid& grid, const ScalarField& f) {
  if (!f.grid || f.grid.get() != &grid)
    throw input_error("field does not belong to this grid");
}
}  // namespace detail

double integrate(const SphereGrid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.node_count())
    throw input_error("integrate: value count does not match grid");
  return grid.weights.dot(values);
}

double integrate(const SphereGrid& grid, const ScalarField& f) {
  detail::check_same_grid(grid, f);
  return integrate(grid, f.values);
}

Derivatives differentiate(const SphereGrid& grid, const ScalarField& f,
                          const DiffOptions& opt) {
  detail::check_same_grid(grid, f);
  const auto& tr = *grid.transform;
  const auto coeffs = tr.analyze(f.values);
  const double res = tr.residual(f.values, coeffs);
  if (opt.enforce && res > opt.residual_tol)
    throw resolution_error("differentiate: interpolation residual " + std::to_string(res) +
                           " exceeds tolerance " + std::to_string(opt.residual_tol) +
                           "; increase the grid resolution");
  auto d = tr.synth_derivs(coeffs);
  Derivatives out;
  out.grad = GradientField{f.grid, std::move(d.grad)};
  out.hess = HessianField{f.grid, std::move(d.hess)};
  out.residual = res;
  return out;
}

std::pair<ScalarField, ScalarField> parity_split(const SphereGrid& grid,
                                                 const ScalarField& f) {
  detail::check_same_grid(grid, f);
  const int N = grid.node_count();
  Eigen::VectorXd even(N), odd(N);
  for (int a = 0; a < N; ++a) {
    const double fa = f.values[a], fb = f.values[grid.antipode[a]];
    even[a] = 0.5 * (fa + fb);
    odd[a] = fa - even[a];
  }
  return {ScalarField(f.grid, std::move(even)), ScalarField(f.grid, std::move(odd))};
}

ScalarField laplacian(const SphereGrid& grid, const ScalarField& f, const DiffOptions& opt) {
  detail::check_same_grid(grid, f);
  const auto& tr = *grid.transform;
  const auto coeffs = tr.analyze(f.values);
  const double res = tr.residual(f.values, coeffs);
  if (opt.enforce && res > opt.residual_tol)
    throw resolution_error("laplacian: interpolation residual above tolerance");
  return ScalarField(f.grid, tr.synth_laplacian(coeffs));
}

}  // namespace hbm
