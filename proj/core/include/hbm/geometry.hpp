#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "hbm/body.hpp"
#include "hbm/sphere.hpp"

namespace hbm {

/// Centro-affine data of a sampled body at every grid node: boundary points,
/// conormals, the metric g = D2h/h, curvature density, and the Christoffel
/// symbols of the induced connection and its conjugate in the node frames.
///
/// Christoffels are recovered numerically by decomposing the second
/// derivatives of X (resp. xi*) in the moving basis {dX(e_i), X}
/// (resp. {dxi*(e_i), xi*}); the transversal component must reproduce -g,
/// and the deviation is recorded as `transversal_residual`.
struct CentroAffineFrame {
  GridPtr grid;
  SupportField field;

  Eigen::MatrixXd X;        // N x n boundary points Dh(theta)
  Eigen::MatrixXd xi_star;  // N x n conormals theta / h
  Eigen::MatrixXd g;        // N x {1|3} metric D2h/h, packed (tt[,tp,pp])
  Eigen::VectorXd inv_kappa;

  std::array<Eigen::MatrixXd, 2> dX;        // dX(e_i), N x n each
  std::array<Eigen::MatrixXd, 2> dxi_star;  // dxi*(e_i)

  // christoffel[k] is N x (n-1)^2 with column i*(n-1)+j holding Gamma^k_{ij}
  // (direction e_i acting on e_j), frame coefficients of the round connection
  // included.
  std::array<Eigen::MatrixXd, 2> christoffel, christoffel_star;

  Eigen::MatrixXd g_star;               // metric recovered from the conormal route
  double transversal_residual = 0.0;    // max |c0_ij + g_ij| over nodes (X route)
  double metric_agreement = 0.0;        // max |g - g_star|

  Eigen::Matrix2d g_matrix(int a) const {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = g(a, 0);
    if (g.cols() == 3) {
      m(0, 1) = m(1, 0) = g(a, 1);
      m(1, 1) = g(a, 2);
    }
    return m;
  }
  Eigen::Matrix2d g_inverse(int a) const;
  double g_det(int a) const {
    return g.cols() == 3 ? g(a, 0) * g(a, 2) - g(a, 1) * g(a, 1) : g(a, 0);
  }

  // Difference tensor of the conjugate connection relative to the round one.
  double conn_star_diff(int a, int i, int j, int k) const;

  // moving basis [dX(e_1) .. dX(e_{n-1}), X] at node a
  Eigen::MatrixXd frame_basis(int a) const;
};

struct FrameOptions {
  double defining_tol = 1e-6;  // tolerance on the transversal residual
  bool enforce = true;
  DiffOptions diff{1e-8, false};
};

CentroAffineFrame frame(const SupportField& field, const FrameOptions& opt = {});

/// 1/kappa = det(hess h + h Id) per node.
ScalarField curvature_density(const SupportField& field);

/// Density of S_p K with respect to the sphere measure: h^{1-p} / kappa.
ScalarField measure_density(const SupportField& field, double p);

/// Density of the cone-volume measure V_K: h / (n kappa).
ScalarField cone_volume_density(const SupportField& field);

/// V(K) = total mass of V_K.
double volume(const SupportField& field);

/// The anisotropic metric P_K(X(theta_a)) in ambient coordinates: the Hessian
/// of ||.||_K^2 / 2 assembled from the moving basis, symmetric
/// positive-definite with P(X,X) = 1 and P(X, dX(e_i)) = 0.
Eigen::MatrixXd anisotropic_metric(const CentroAffineFrame& fr, int node);

enum class EllMode { identity, axis_scaling, isotropic };

struct PinchingReport {
  Eigen::MatrixXd ell;
  double alpha = 0.0;  // min eigenvalue of P over nodes
  double beta = 0.0;   // max eigenvalue of P over nodes
  double gamma = 1.0;  // beta / alpha
  double p_gamma = 0.0;
  int argmin = -1, argmax = -1;
  bool search_failed = false;  // optimizer fell back to the identity map
  bool non_rigorous = true;    // grid-sampled estimate, not a certified bound
};

struct PinchingOptions {
  FrameOptions frame;
  SampleOptions sample;
  int sweeps = 3;            // coordinate-descent sweeps (axis mode)
  double search_tol = 1e-8;  // golden-section tolerance in log scale
};

/// Extreme eigenvalues of P over the grid for the frame's body (identity
/// mode) or for ell K with ell chosen by the requested heuristic. Non-identity
/// modes resample the body through its BodySpec.
PinchingReport pinching(const CentroAffineFrame& fr, EllMode mode = EllMode::identity,
                        const PinchingOptions& opt = {});

/// Pinching of ell K for an explicit map.
PinchingReport pinching_with_map(const CentroAffineFrame& fr, const Eigen::MatrixXd& ell,
                                 const PinchingOptions& opt = {});

struct HessStarResult {
  HessianField hess;   // Hess* f in node frames
  ScalarField trace_g;  // tr_g Hess* f
};

/// Hessian with respect to the conjugate centro-affine structure and its
/// g-trace (two routes to the same operator as the local-coordinates formula).
HessStarResult hess_star(const CentroAffineFrame& fr, const ScalarField& f,
                         const DiffOptions& opt = {.residual_tol = 1e-8, .enforce = false});

/// Residual of the conjugacy identity between nabla, nabla* and g
/// on seeded random data; exact in the continuum.
double conjugate_identity_residual(const CentroAffineFrame& fr, std::uint64_t seed);

}  // namespace hbm
