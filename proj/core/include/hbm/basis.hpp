#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "hbm/sphere.hpp"

namespace hbm {

enum class Parity { any, even, odd };

struct BasisInfo {
  int degree = 0;  // trig frequency k (n=2) or harmonic degree l (n=3)
  int order = 0;   // longitude order m (n=3 only)
  int kind = 0;    // 0 = cos branch, 1 = sin branch
  bool even = false;
};

/// Orthonormal real basis (Fourier modes / real spherical harmonics) up to
/// `max_degree`, tabulated on a grid: values and tangent-frame gradients,
/// one column per basis function, ordered by degree.
struct BasisTable {
  GridPtr grid;
  int max_degree = 0;
  std::vector<BasisInfo> info;
  Eigen::MatrixXd values;               // N x count
  std::array<Eigen::MatrixXd, 2> grad;  // frame components, N x count each

  int count() const { return static_cast<int>(info.size()); }
  std::vector<int> parity_indices(bool even) const;
};

BasisTable build_basis_table(const GridPtr& grid, int max_degree);

/// Synthesize sum_i coeff[i] * basis_i as a field.
ScalarField synthesize(const BasisTable& basis, const Eigen::VectorXd& coeff);

/// Deterministic pseudo-random band-limited field: coefficients uniform in
/// [-1,1] damped by 1/(1+degree)^2, filtered to the requested parity,
/// normalized to unit sup norm. Identical bytes for identical (grid
/// signature, max_degree, seed) across platforms.
ScalarField random_band_limited(const GridPtr& grid, int max_degree, std::uint64_t seed,
                                Parity parity = Parity::any);

}  // namespace hbm
