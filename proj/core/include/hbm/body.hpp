#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hbm/sphere.hpp"

namespace hbm {

struct Ball {
  double radius = 1.0;
};

struct Ellipsoid {
  Eigen::VectorXd semi_axes;
};

// {x : ||x||_q <= scale}, q > 2. The support function is the dual norm
// scale * ||.||_{q/(q-1)}.
struct LpBall {
  double exponent = 4.0;
  double scale = 1.0;
};

// h = base_radius * (1 + sum c_k B_k) with B_k = cos(k phi) for n=2 and the
// Legendre polynomial P_k(z) for n=3; only even degrees k are allowed, which
// keeps the body origin-symmetric by construction.
struct HarmonicPerturbation {
  double base_radius = 1.0;
  std::vector<std::pair<int, double>> modes;
};

/// Declarative description of an origin-symmetric convex body, optionally
/// composed with an invertible linear map: the body is ell * K0.
struct BodySpec {
  int dim = 2;
  std::variant<Ball, Ellipsoid, LpBall, HarmonicPerturbation> family;
  std::optional<Eigen::MatrixXd> ell;

  static BodySpec make_ball(int dim, double radius = 1.0);
  static BodySpec make_ellipsoid(Eigen::VectorXd semi_axes);
  static BodySpec make_lp_ball(int dim, double exponent, double scale = 1.0);
  static BodySpec make_harmonic(int dim, double base_radius,
                                std::vector<std::pair<int, double>> modes);

  /// Compose an additional linear map on the left: (m * ell) K0.
  BodySpec with_ell(const Eigen::MatrixXd& m) const;

  std::string family_name() const;
};

/// Support function h_K(theta) for unit theta.
double support(const BodySpec& spec, const Eigen::VectorXd& theta);

/// Minkowski gauge ||x||_K, positively 1-homogeneous, x != 0.
double gauge(const BodySpec& spec, const Eigen::VectorXd& x);

/// The body as sampled data: h and its tangent-frame derivatives on a grid.
/// d2h packs the matrices hess(h) + h * Id columnwise like HessianField.
struct SupportField {
  GridPtr grid;
  BodySpec spec;
  Eigen::VectorXd h;
  GradientField grad_h;
  HessianField hess_h;
  Eigen::MatrixXd d2h;
  double diff_residual = 0.0;

  Eigen::Matrix2d d2h_matrix(int a) const {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = d2h(a, 0);
    if (d2h.cols() == 3) {
      m(0, 1) = m(1, 0) = d2h(a, 1);
      m(1, 1) = d2h(a, 2);
    }
    return m;
  }
  double d2h_det(int a) const {
    return d2h.cols() == 3 ? d2h(a, 0) * d2h(a, 2) - d2h(a, 1) * d2h(a, 1) : d2h(a, 0);
  }
  double d2h_min_eig(int a) const;

  /// Boundary point X_K(theta_a) = grad h + h * theta.
  Eigen::VectorXd boundary_point(int a) const;
};

struct SampleOptions {
  DiffOptions diff;
};

SupportField sample(const BodySpec& spec, const GridPtr& grid, const SampleOptions& opt = {});

struct ValidityReport {
  double min_h = 0.0;
  double min_d2h_eig = 0.0;
  int argmin_h = -1;
  int argmin_eig = -1;
  bool pass = false;
};

/// Positivity of h and of hess(h) + h*Id over all nodes (membership in the
/// class of smooth origin-symmetric bodies with positive curvature).
ValidityReport validate(const SupportField& field);

}  // namespace hbm
