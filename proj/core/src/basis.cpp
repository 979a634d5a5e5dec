#include "hbm/basis.hpp"

#include <cmath>
#include <random>

#include "transform.hpp"

namespace hbm {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<int> BasisTable::parity_indices(bool even) const {
  std::vector<int> idx;
  for (int i = 0; i < count(); ++i)
    if (info[i].even == even) idx.push_back(i);
  return idx;
}

BasisTable build_basis_table(const GridPtr& grid, int max_degree) {
  if (!grid) throw input_error("build_basis_table: null grid");
  if (max_degree < 0) throw input_error("build_basis_table: negative degree");
  if (max_degree > grid->transform->analysis_degree())
    throw resolution_error("build_basis_table: degree not resolvable on this grid");

  BasisTable t;
  t.grid = grid;
  t.max_degree = max_degree;
  const int N = grid->node_count();

  if (grid->dim == 2) {
    const int count = 2 * max_degree + 1;
    t.values.resize(N, count);
    t.grad[0].resize(N, count);
    int col = 0;
    auto push = [&](int k, int kind) {
      t.info.push_back({k, 0, kind, k % 2 == 0});
      const double s = (k == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
      for (int a = 0; a < N; ++a) {
        const double ph = grid->phis[a];
        if (kind == 0) {
          t.values(a, col) = s * std::cos(k * ph);
          t.grad[0](a, col) = -s * k * std::sin(k * ph);
        } else {
          t.values(a, col) = s * std::sin(k * ph);
          t.grad[0](a, col) = s * k * std::cos(k * ph);
        }
      }
      ++col;
    };
    push(0, 0);
    for (int k = 1; k <= max_degree; ++k) {
      push(k, 0);
      push(k, 1);
    }
    return t;
  }

  // n = 3: real spherical harmonics through the per-ring Legendre tables
  const int L = max_degree;
  const auto leg = detail::build_legendre_tables(grid->ring_x, L);
  const int count = (L + 1) * (L + 1);
  t.values.resize(N, count);
  t.grad[0].resize(N, count);
  t.grad[1].resize(N, count);

  Eigen::VectorXd sin_th(grid->n_lat);
  for (int i = 0; i < grid->n_lat; ++i)
    sin_th[i] = std::sqrt(std::max(0.0, 1.0 - grid->ring_x[i] * grid->ring_x[i]));

  int col = 0;
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const double s = (m == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
      const int kinds = (m == 0) ? 1 : 2;
      for (int kind = 0; kind < kinds; ++kind) {
        t.info.push_back({l, m, kind, l % 2 == 0});
        for (int i = 0; i < grid->n_lat; ++i) {
          const double q = leg.val[m](i, l - m);
          const double dq = leg.dtheta[m](i, l - m);
          for (int j = 0; j < grid->n_lon; ++j) {
            const int a = i * grid->n_lon + j;
            const double c = std::cos(m * grid->phis[j]);
            const double sn = std::sin(m * grid->phis[j]);
            const double trig = (kind == 0) ? c : sn;
            const double dtrig = (kind == 0) ? -m * sn : m * c;
            t.values(a, col) = s * q * trig;
            t.grad[0](a, col) = s * dq * trig;
            t.grad[1](a, col) = s * q * dtrig / sin_th[i];
          }
        }
        ++col;
      }
    }
  }
  return t;
}

ScalarField synthesize(const BasisTable& basis, const Eigen::VectorXd& coeff) {
  if (coeff.size() != basis.count())
    throw input_error("synthesize: coefficient count does not match basis");
  return ScalarField(basis.grid, basis.values * coeff);
}

ScalarField random_band_limited(const GridPtr& grid, int max_degree, std::uint64_t seed,
                                Parity parity) {
  BasisTable basis = build_basis_table(grid, max_degree);
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    // uniform in [-1,1], bit-stable across platforms
    return 2.0 * ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
  };
  Eigen::VectorXd coeff(basis.count());
  for (int i = 0; i < basis.count(); ++i) {
    const double u = unit();  // always consume, so draws are parity-independent
    const bool keep = parity == Parity::any || (parity == Parity::even) == basis.info[i].even;
    const double damp = 1.0 / ((1.0 + basis.info[i].degree) * (1.0 + basis.info[i].degree));
    coeff[i] = keep ? u * damp : 0.0;
  }
  ScalarField f = synthesize(basis, coeff);
  const double peak = f.values.cwiseAbs().maxCoeff();
  if (peak > 0) f.values /= peak;
  return f;
}

}  // namespace hbm
