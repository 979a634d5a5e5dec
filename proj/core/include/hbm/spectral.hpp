#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hbm/basis.hpp"
#include "hbm/geometry.hpp"

namespace hbm {

/// Galerkin matrices of -Delta_K in L^2(V_K) over a definite-parity harmonic
/// basis: stiffness A_ij = int <grad phi_i, grad phi_j>_g dV_K and mass
/// M_ij = int phi_i phi_j dV_K.
struct OperatorSystem {
  GridPtr grid;
  int degree = 0;
  BasisTable basis;
  Eigen::MatrixXd A, M;
  std::vector<int> even_idx, odd_idx;
  double parity_offblock = 0.0;  // max |A_ij|, |M_ij| over opposite-parity pairs
};

/// Requires 2 * degree <= grid degree so products of basis functions are
/// integrated accurately against the measure densities.
OperatorSystem assemble(const CentroAffineFrame& fr, int degree);

struct EigenPair {
  double value = 0.0;
  bool even = false;
  double residual = 0.0;       // ||A v - lambda M v|| / ||M v||
  Eigen::VectorXd coeff;       // in the full basis (zeros on the other parity)
};

struct SpectralResult {
  std::vector<EigenPair> eigs;  // ascending
  double lambda1 = 0.0;
  int lambda1_multiplicity = 0;
  double lambda1_even = 0.0;
  double cluster_rtol = 1e-6;
  int degree = 0;
  bool converged = false;          // set by spectrum_with_convergence
  double refinement_drift = -1.0;  // |lambda_1e(L) - lambda_1e(L+4)|
};

struct SolveOptions {
  double cluster_rtol = 1e-6;
};

/// Symmetric-definite generalized eigensolve by parity block (the parity
/// split is exact for origin-symmetric bodies). parity == even restricts to
/// the even block; parity == any merges both blocks.
SpectralResult solve(const OperatorSystem& sys, Parity parity = Parity::any,
                     const SolveOptions& opt = {});

/// Solve at `degree` and `degree + 4` and flag convergence when the reported
/// eigenvalues agree to 1e-4. Returns the refined result.
SpectralResult spectrum_with_convergence(const CentroAffineFrame& fr, int degree,
                                         Parity parity = Parity::any,
                                         const SolveOptions& opt = {});

/// Pointwise Delta_K f through the local-coordinates formula
/// (D2h^{-1})^{ij} [hess(f h) + (f h) delta]_{ij} - (n-1) f.
ScalarField hbm_apply(const CentroAffineFrame& fr, const ScalarField& f);

struct BochnerCheck {
  double lhs = 0.0;  // int (Delta_K f)^2 dV_K
  double rhs = 0.0;  // int |Hess* f|_g^2 + (n-2) |grad f|_g^2 dV_K
  double relative_gap = 0.0;
};

BochnerCheck bochner_check(const CentroAffineFrame& fr, const ScalarField& f);

struct LocalBMCheck {
  double quotient = 0.0;  // Rayleigh quotient of the V_K-mean-projected input
  double margin = 0.0;    // quotient - (n-1)
};

LocalBMCheck local_bm_check(const CentroAffineFrame& fr, const ScalarField& f);

struct PairingCheck {
  double lhs = 0.0;  // int g (-Delta_K f) dV_K
  double rhs = 0.0;  // int <grad f, grad g>_g dV_K
  double relative_gap = 0.0;
};

/// Self-adjointness oracle: integration-by-parts pairing computed through two
/// unrelated code paths.
PairingCheck selfadjoint_check(const CentroAffineFrame& fr, const ScalarField& f,
                               const ScalarField& g);

/// Max pointwise gap between hbm_apply and tr_g Hess*, relative to the scale
/// of Delta_K f.
double laplacian_route_gap(const CentroAffineFrame& fr, const ScalarField& f);

}  // namespace hbm
