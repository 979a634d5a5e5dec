#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "hbm/errors.hpp"

namespace hbm {

namespace detail {
class HarmonicTransform;
}

/// Quadrature grid on S^{n-1}, n in {2,3}, antipodally closed.
///
/// n=2: m uniform angles, equal weights 2*pi/m.
/// n=3: Gauss-Legendre latitudes x resolution, 2*resolution uniform
/// longitudes; node index a = ring*n_lon + lon.
///
/// `degree` is the largest L such that the quadrature integrates products
/// of two harmonics of degree <= L exactly. Antipodal pairing is exact by
/// construction: nodes in the lower half are stored as the negation of
/// their partners.
struct SphereGrid {
  int dim = 0;         // ambient dimension n
  int resolution = 0;  // m for n=2, number of latitude rings for n=3
  int degree = 0;      // L

  Eigen::MatrixXd nodes;    // N x dim, unit vectors
  Eigen::VectorXd weights;  // N, positive
  std::vector<int> antipode;

  // Orthonormal tangent frames; frames[i] is N x dim. For n=3 the frame is
  // (e_theta, e_phi); for n=2 only frames[0] (the positively oriented unit
  // tangent) is populated.
  std::array<Eigen::MatrixXd, 2> frames;

  // Ring structure (n=3): ring_x ascending in cos(theta), mirrored exactly.
  int n_lat = 0, n_lon = 0;
  Eigen::VectorXd ring_x, ring_w;
  Eigen::VectorXd phis;  // longitudes (n=3) or node angles (n=2)

  std::shared_ptr<const detail::HarmonicTransform> transform;

  int node_count() const { return static_cast<int>(nodes.rows()); }
  int tangent_dim() const { return dim - 1; }
  double total_measure() const { return weights.sum(); }
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// One real value per grid node.
struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  ScalarField(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid || values.size() != grid->node_count())
      throw input_error("ScalarField: value count does not match grid");
  }
};

/// Tangent-frame components of a gradient: N x (n-1).
struct GradientField {
  GridPtr grid;
  Eigen::MatrixXd comp;

  // Ambient vector at node a.
  Eigen::VectorXd ambient(int a) const;
};

/// Covariant Hessian in the node frame, packed columns:
/// n=2 -> (tt); n=3 -> (tt, tp, pp).
struct HessianField {
  GridPtr grid;
  Eigen::MatrixXd comp;

  Eigen::Matrix2d matrix(int a) const {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    h(0, 0) = comp(a, 0);
    if (comp.cols() == 3) {
      h(0, 1) = h(1, 0) = comp(a, 1);
      h(1, 1) = comp(a, 2);
    }
    return h;
  }
  double trace(int a) const { return comp.cols() == 3 ? comp(a, 0) + comp(a, 2) : comp(a, 0); }
};

struct DiffOptions {
  double residual_tol = 1e-8;  // relative interpolation residual
  bool enforce = true;         // throw resolution_error above tolerance
};

struct Derivatives {
  GradientField grad;
  HessianField hess;
  double residual = 0.0;  // relative interpolation residual of the input
};

/// Build an antipodally closed quadrature grid.
/// resolution must be even and >= 8; dim in {2,3}.
GridPtr build_grid(int dim, int resolution);

double integrate(const SphereGrid& grid, const Eigen::VectorXd& values);
double integrate(const SphereGrid& grid, const ScalarField& f);

/// Gradient and covariant Hessian of the band-limited interpolant of f,
/// in the node tangent frames. Exact for band-limited input; reports the
/// interpolation residual and (by default) throws if it exceeds tolerance.
Derivatives differentiate(const SphereGrid& grid, const ScalarField& f,
                          const DiffOptions& opt = {});

/// (even part, odd part); f_e(a) = (f(a) + f(-a))/2. Exact on the grid.
std::pair<ScalarField, ScalarField> parity_split(const SphereGrid& grid, const ScalarField& f);

/// Laplace-Beltrami of the interpolant (round metric), for diagnostics.
ScalarField laplacian(const SphereGrid& grid, const ScalarField& f, const DiffOptions& opt = {});

namespace detail {
void check_same_grid(const SphereGrid& grid, const ScalarField& f);
}

}  // namespace hbm
