#pragma once

// Band-limited analysis/synthesis on the grids of sphere.hpp.
// n=2: real trigonometric series on uniform angles.
// n=3: real spherical harmonics on a Gauss-Legendre x uniform product grid,
// evaluated through orthonormalized associated Legendre tables.

#include <Eigen/Dense>
#include <vector>

namespace hbm {

struct SphereGrid;

namespace detail {

// Orthonormalized associated Legendre values: integral of Pbar_lm^2 over
// [-1,1] equals 1. No Condon-Shortley sign.
struct LegendreTables {
  int max_degree = 0;
  // tables[m]: rows = latitude nodes, cols = l - m for l in [m, L].
  std::vector<Eigen::MatrixXd> val, dtheta, d2theta;
};

LegendreTables build_legendre_tables(const Eigen::VectorXd& x, int max_degree);

// Gauss-Legendre nodes (ascending) and weights on [-1,1], exactly mirrored.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w);

struct SphereCoeffs {
  // ccos(l, m) for m in [0, L]; csin(l, m) for m in [1, L]; both (L+1)^2 dense.
  Eigen::MatrixXd ccos, csin;
};

// All first and second tangent-frame derivatives of the interpolant,
// evaluated at the grid nodes.
struct SynthDerivs {
  Eigen::MatrixXd grad;  // N x (n-1)
  Eigen::MatrixXd hess;  // N x 1 (tt) or N x 3 (tt, tp, pp)
};

class HarmonicTransform {
 public:
  explicit HarmonicTransform(const SphereGrid& grid);

  int analysis_degree() const { return degree_; }

  // n=2 coefficient layout reuses SphereCoeffs row 0: ccos(0,k), csin(0,k).
  SphereCoeffs analyze(const Eigen::VectorXd& f) const;
  Eigen::VectorXd synth(const SphereCoeffs& c) const;
  SynthDerivs synth_derivs(const SphereCoeffs& c) const;
  Eigen::VectorXd synth_laplacian(const SphereCoeffs& c) const;

  // max of reconstruction error at nodes and relative tail energy
  // (degrees above 3/4 of the analysis degree), both relative.
  double residual(const Eigen::VectorXd& f, const SphereCoeffs& c) const;

 private:
  int dim_, degree_;
  int n_lat_ = 0, n_lon_ = 0;

  // n=2: angle tables; n=3: longitude tables. cos_tab(j, m) = cos(m phi_j).
  Eigen::MatrixXd cos_tab_, sin_tab_;
  Eigen::VectorXd ring_w_;
  Eigen::VectorXd sin_theta_, cot_theta_;  // per ring (n=3)
  LegendreTables leg_;

  double coeff_energy(const SphereCoeffs& c, int from_degree) const;
};

}  // namespace detail
}  // namespace hbm
