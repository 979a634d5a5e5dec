#include "hbm/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace hbm {

OperatorSystem assemble(const CentroAffineFrame& fr, int degree) {
  const auto& grid = *fr.grid;
  if (degree < 0) throw input_error("assemble: negative degree");
  if (2 * degree > grid.degree)
    throw resolution_error("assemble: basis degree " + std::to_string(degree) +
                           " is under-resolved on a grid of degree " +
                           std::to_string(grid.degree));

  OperatorSystem sys;
  sys.grid = fr.grid;
  sys.degree = degree;
  sys.basis = build_basis_table(fr.grid, degree);
  const int count = sys.basis.count();
  const int N = grid.node_count();
  const int td = grid.tangent_dim();

  const Eigen::VectorXd rho = cone_volume_density(fr.field).values;
  const Eigen::VectorXd wr = grid.weights.cwiseProduct(rho);

  sys.M = sys.basis.values.transpose() * wr.asDiagonal() * sys.basis.values;

  sys.A = Eigen::MatrixXd::Zero(count, count);
  Eigen::MatrixXd ginv(N, td * td);
  for (int a = 0; a < N; ++a) {
    const Eigen::Matrix2d gi = fr.g_inverse(a);
    for (int i = 0; i < td; ++i)
      for (int j = 0; j < td; ++j) ginv(a, i * td + j) = gi(i, j);
  }
  for (int i = 0; i < td; ++i)
    for (int j = 0; j < td; ++j) {
      const Eigen::VectorXd d = wr.cwiseProduct(ginv.col(i * td + j));
      sys.A.noalias() +=
          sys.basis.grad[i].transpose() * d.asDiagonal() * sys.basis.grad[j];
    }
  sys.A = 0.5 * (sys.A + sys.A.transpose()).eval();
  sys.M = 0.5 * (sys.M + sys.M.transpose()).eval();

  sys.even_idx = sys.basis.parity_indices(true);
  sys.odd_idx = sys.basis.parity_indices(false);
  double off = 0.0;
  for (int e : sys.even_idx)
    for (int o : sys.odd_idx)
      off = std::max({off, std::abs(sys.A(e, o)), std::abs(sys.M(e, o))});
  sys.parity_offblock = off;
  return sys;
}

namespace {

struct BlockEigs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, M-orthonormal within the block
};

BlockEigs solve_block(const OperatorSystem& sys, const std::vector<int>& idx) {
  const int nb = static_cast<int>(idx.size());
  Eigen::MatrixXd A(nb, nb), M(nb, nb);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) {
      A(r, c) = sys.A(idx[r], idx[c]);
      M(r, c) = sys.M(idx[r], idx[c]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  if (es.info() != Eigen::Success)
    throw numeric_error("solve: mass matrix factorization failed; the system is "
                        "under-resolved");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

SpectralResult solve(const OperatorSystem& sys, Parity parity, const SolveOptions& opt) {
  SpectralResult out;
  out.cluster_rtol = opt.cluster_rtol;
  out.degree = sys.degree;
  const int count = static_cast<int>(sys.A.rows());

  auto push_block = [&](const std::vector<int>& idx, bool even) {
    const BlockEigs be = solve_block(sys, idx);
    for (int k = 0; k < be.values.size(); ++k) {
      EigenPair p;
      p.value = be.values[k];
      p.even = even;
      p.coeff = Eigen::VectorXd::Zero(count);
      for (size_t r = 0; r < idx.size(); ++r) p.coeff[idx[r]] = be.vectors(r, k);
      const Eigen::VectorXd Av = sys.A * p.coeff;
      const Eigen::VectorXd Mv = sys.M * p.coeff;
      p.residual = (Av - p.value * Mv).norm() / Mv.norm();
      out.eigs.push_back(std::move(p));
    }
  };

  if (parity == Parity::any || parity == Parity::even) push_block(sys.even_idx, true);
  if (parity == Parity::any || parity == Parity::odd) push_block(sys.odd_idx, false);
  std::stable_sort(out.eigs.begin(), out.eigs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });

  if (parity != Parity::odd) {
    // locate the zero mode (the constant lives in the even block)
    const auto zero_it =
        std::find_if(out.eigs.begin(), out.eigs.end(), [](const EigenPair& p) { return p.even; });
    if (zero_it == out.eigs.end()) throw numeric_error("solve: even block is empty");
    double next_even = 0.0;
    for (auto it = zero_it + 1; it != out.eigs.end(); ++it)
      if (it->even) {
        next_even = it->value;
        break;
      }
    if (!(std::abs(zero_it->value) <= 1e-7 * std::max(1.0, next_even)))
      throw numeric_error("solve: zero eigenvalue of the constant mode not recovered");
    out.lambda1_even = next_even;
  }

  // first nonzero eigenvalue over the requested parity selection
  double zero_value = out.eigs.empty() ? 0.0 : out.eigs.front().value;
  double lam1 = 0.0;
  for (const auto& p : out.eigs) {
    if (parity != Parity::odd && p.even && std::abs(p.value) <= 1e-7 * std::max(1.0, out.lambda1_even))
      continue;  // skip the constant mode
    lam1 = p.value;
    break;
  }
  (void)zero_value;
  out.lambda1 = lam1;
  out.lambda1_multiplicity = 0;
  for (const auto& p : out.eigs)
    if (std::abs(p.value - lam1) <= opt.cluster_rtol * std::max(1.0, std::abs(lam1)))
      ++out.lambda1_multiplicity;
  return out;
}

SpectralResult spectrum_with_convergence(const CentroAffineFrame& fr, int degree,
                                         Parity parity, const SolveOptions& opt) {
  SpectralResult base = solve(assemble(fr, degree), parity, opt);
  if (2 * (degree + 4) > fr.grid->degree) {
    base.converged = false;
    base.refinement_drift = -1.0;
    return base;
  }
  SpectralResult fine = solve(assemble(fr, degree + 4), parity, opt);
  const double drift = std::abs(fine.lambda1_even - base.lambda1_even);
  fine.refinement_drift = drift;
  fine.converged = drift < 1e-4 * std::max(1.0, fine.lambda1_even);
  return fine;
}

ScalarField hbm_apply(const CentroAffineFrame& fr, const ScalarField& f) {
  const auto& grid = *fr.grid;
  detail::check_same_grid(grid, f);
  const int N = grid.node_count();
  const int td = grid.tangent_dim();
  const int n = grid.dim;

  Eigen::VectorXd fh = f.values.cwiseProduct(fr.field.h);
  auto d = differentiate(grid, ScalarField(fr.grid, fh), DiffOptions{1e-8, false});

  Eigen::VectorXd out(N);
  for (int a = 0; a < N; ++a) {
    Eigen::Matrix2d D2fh = d.hess.matrix(a);
    D2fh(0, 0) += fh[a];
    if (td == 2) D2fh(1, 1) += fh[a];
    const Eigen::Matrix2d d2h = fr.field.d2h_matrix(a);
    double tr = 0.0;
    if (td == 1) {
      tr = D2fh(0, 0) / d2h(0, 0);
    } else {
      const double det = d2h(0, 0) * d2h(1, 1) - d2h(0, 1) * d2h(1, 0);
      // (D2h)^{-1} : D2fh
      tr = (d2h(1, 1) * D2fh(0, 0) - 2.0 * d2h(0, 1) * D2fh(0, 1) +
            d2h(0, 0) * D2fh(1, 1)) /
           det;
    }
    out[a] = tr - (n - 1) * f.values[a];
  }
  return ScalarField(fr.grid, std::move(out));
}

BochnerCheck bochner_check(const CentroAffineFrame& fr, const ScalarField& f) {
  const auto& grid = *fr.grid;
  const int N = grid.node_count();
  const int td = grid.tangent_dim();
  const int n = grid.dim;

  const ScalarField lap = hbm_apply(fr, f);
  const Eigen::VectorXd rho = cone_volume_density(fr.field).values;

  const auto hs = hess_star(fr, f);
  const auto d = differentiate(grid, f, DiffOptions{1e-8, false});

  double lhs = 0.0, rhs = 0.0;
  for (int a = 0; a < N; ++a) {
    const double w = grid.weights[a] * rho[a];
    lhs += w * lap.values[a] * lap.values[a];
    const Eigen::Matrix2d gi = fr.g_inverse(a);
    const Eigen::Matrix2d H = hs.hess.matrix(a);
    double hess2 = 0.0, grad2 = 0.0;
    if (td == 1) {
      hess2 = gi(0, 0) * H(0, 0) * gi(0, 0) * H(0, 0);
      grad2 = gi(0, 0) * d.grad.comp(a, 0) * d.grad.comp(a, 0);
    } else {
      const Eigen::Matrix2d GH = gi * H;
      hess2 = (GH * GH).trace();
      const Eigen::Vector2d gr(d.grad.comp(a, 0), d.grad.comp(a, 1));
      grad2 = gr.dot(gi * gr);
    }
    rhs += w * (hess2 + (n - 2) * grad2);
  }
  BochnerCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.relative_gap = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return out;
}

LocalBMCheck local_bm_check(const CentroAffineFrame& fr, const ScalarField& f) {
  const auto& grid = *fr.grid;
  detail::check_same_grid(grid, f);
  const int N = grid.node_count();
  const int td = grid.tangent_dim();

  const Eigen::VectorXd rho = cone_volume_density(fr.field).values;
  const Eigen::VectorXd wr = grid.weights.cwiseProduct(rho);
  const double mass = wr.sum();
  const double mean = wr.dot(f.values) / mass;
  Eigen::VectorXd f0 = f.values.array() - mean;

  const double l2 = wr.dot(f0.cwiseProduct(f0));
  if (l2 <= 1e-28 * mass)
    throw input_error("local_bm_check: input is constant after mean projection");

  auto d = differentiate(grid, ScalarField(fr.grid, f0), DiffOptions{1e-8, false});
  double dirichlet = 0.0;
  for (int a = 0; a < N; ++a) {
    const Eigen::Matrix2d gi = fr.g_inverse(a);
    if (td == 1) {
      dirichlet += wr[a] * gi(0, 0) * d.grad.comp(a, 0) * d.grad.comp(a, 0);
    } else {
      const Eigen::Vector2d gr(d.grad.comp(a, 0), d.grad.comp(a, 1));
      dirichlet += wr[a] * gr.dot(gi * gr);
    }
  }
  LocalBMCheck out;
  out.quotient = dirichlet / l2;
  out.margin = out.quotient - (grid.dim - 1);
  return out;
}

PairingCheck selfadjoint_check(const CentroAffineFrame& fr, const ScalarField& f,
                               const ScalarField& g) {
  const auto& grid = *fr.grid;
  detail::check_same_grid(grid, f);
  detail::check_same_grid(grid, g);
  const int N = grid.node_count();
  const int td = grid.tangent_dim();

  const Eigen::VectorXd rho = cone_volume_density(fr.field).values;
  const Eigen::VectorXd wr = grid.weights.cwiseProduct(rho);

  const ScalarField lap = hbm_apply(fr, f);
  const double lhs = -wr.dot(g.values.cwiseProduct(lap.values));

  auto df = differentiate(grid, f, DiffOptions{1e-8, false});
  auto dg = differentiate(grid, g, DiffOptions{1e-8, false});
  double rhs = 0.0, nf = 0.0, ng = 0.0;
  for (int a = 0; a < N; ++a) {
    const Eigen::Matrix2d gi = fr.g_inverse(a);
    double dot = 0.0, ff = 0.0, gg = 0.0;
    for (int i = 0; i < td; ++i)
      for (int j = 0; j < td; ++j) {
        dot += gi(i, j) * df.grad.comp(a, i) * dg.grad.comp(a, j);
        ff += gi(i, j) * df.grad.comp(a, i) * df.grad.comp(a, j);
        gg += gi(i, j) * dg.grad.comp(a, i) * dg.grad.comp(a, j);
      }
    rhs += wr[a] * dot;
    nf += wr[a] * (f.values[a] * f.values[a] + ff);
    ng += wr[a] * (g.values[a] * g.values[a] + gg);
  }
  PairingCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.relative_gap = std::abs(lhs - rhs) / std::max(std::sqrt(nf * ng), 1e-300);
  return out;
}

double laplacian_route_gap(const CentroAffineFrame& fr, const ScalarField& f) {
  const ScalarField a = hbm_apply(fr, f);
  const auto hs = hess_star(fr, f);
  const double scale = std::max(a.values.cwiseAbs().maxCoeff(), 1e-300);
  return (a.values - hs.trace_g.values).cwiseAbs().maxCoeff() / scale;
}

}  // namespace hbm
