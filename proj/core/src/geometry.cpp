#include "hbm/geometry.hpp"

#include <cmath>
#include <random>

#include "hbm/basis.hpp"

namespace hbm {

namespace {

// frame coefficients of the round connection: nabla_{e_i} e_j = w^k_{ij} e_k
inline double round_coeff(const SphereGrid& grid, int a, int i, int j, int k) {
  if (grid.dim == 2) return 0.0;
  const double z = grid.nodes(a, 2);
  const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double ct = z / st;
  if (i == 1 && j == 0 && k == 1) return ct;
  if (i == 1 && j == 1 && k == 0) return -ct;
  return 0.0;
}

inline int pack(int i, int j, int td) { return i * td + j; }

}  // namespace

Eigen::Matrix2d CentroAffineFrame::g_inverse(int a) const {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  if (g.cols() == 1) {
    m(0, 0) = 1.0 / g(a, 0);
    return m;
  }
  const double det = g_det(a);
  m(0, 0) = g(a, 2) / det;
  m(1, 1) = g(a, 0) / det;
  m(0, 1) = m(1, 0) = -g(a, 1) / det;
  return m;
}

double CentroAffineFrame::conn_star_diff(int a, int i, int j, int k) const {
  const int td = grid->tangent_dim();
  return christoffel_star[k](a, pack(i, j, td)) - round_coeff(*grid, a, i, j, k);
}

Eigen::MatrixXd CentroAffineFrame::frame_basis(int a) const {
  const int n = grid->dim;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n - 1; ++i) B.col(i) = dX[i].row(a).transpose();
  B.col(n - 1) = X.row(a).transpose();
  return B;
}

CentroAffineFrame frame(const SupportField& field, const FrameOptions& opt) {
  const auto& grid = *field.grid;
  const int N = grid.node_count();
  const int n = grid.dim;
  const int td = n - 1;

  const auto vr = validate(field);
  if (!vr.pass)
    throw input_error("frame: support field is not a valid convex body "
                      "(min h or min eig of D2h is non-positive)");

  CentroAffineFrame fr;
  fr.grid = field.grid;
  fr.field = field;
  fr.X.resize(N, n);
  fr.xi_star.resize(N, n);
  fr.g = field.d2h;
  fr.inv_kappa.resize(N);
  for (int a = 0; a < N; ++a) {
    fr.X.row(a) = field.boundary_point(a).transpose();
    fr.xi_star.row(a) = grid.nodes.row(a) / field.h[a];
    fr.g.row(a) /= field.h[a];
    fr.inv_kappa[a] = field.d2h_det(a);
  }

  // dX(e_i) = sum_j D2h_ij e_j;  dxi*(e_i) = e_i/h - (d_i h / h^2) theta
  for (int i = 0; i < td; ++i) {
    fr.dX[i].resize(N, n);
    fr.dxi_star[i].resize(N, n);
    for (int a = 0; a < N; ++a) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      const Eigen::Matrix2d d2h = field.d2h_matrix(a);
      for (int j = 0; j < td; ++j) v += d2h(i, j) * grid.frames[j].row(a).transpose();
      fr.dX[i].row(a) = v.transpose();
      const double h = field.h[a];
      fr.dxi_star[i].row(a) = grid.frames[i].row(a) / h -
                              (field.grad_h.comp(a, i) / (h * h)) * grid.nodes.row(a);
    }
  }

  // covariant Hessians of the ambient components of X and xi*
  std::vector<HessianField> hX(n), hXi(n);
  for (int c = 0; c < n; ++c) {
    hX[c] = differentiate(grid, ScalarField(field.grid, fr.X.col(c)), opt.diff).hess;
    hXi[c] = differentiate(grid, ScalarField(field.grid, fr.xi_star.col(c)), opt.diff).hess;
  }

  for (int k = 0; k < td; ++k) {
    fr.christoffel[k].resize(N, td * td);
    fr.christoffel_star[k].resize(N, td * td);
  }
  fr.g_star.resizeLike(fr.g);

  double trans_res = 0.0, metric_gap = 0.0;
  for (int a = 0; a < N; ++a) {
    Eigen::MatrixXd B = fr.frame_basis(a);
    Eigen::MatrixXd Bs(n, n);
    for (int i = 0; i < td; ++i) Bs.col(i) = fr.dxi_star[i].row(a).transpose();
    Bs.col(n - 1) = fr.xi_star.row(a).transpose();

    Eigen::PartialPivLU<Eigen::MatrixXd> luB(B), luBs(Bs);
    const Eigen::Matrix2d ga = fr.g_matrix(a);

    for (int i = 0; i < td; ++i)
      for (int j = i; j < td; ++j) {
        Eigen::VectorXd w(n), ws(n);
        for (int c = 0; c < n; ++c) {
          const Eigen::Matrix2d m = hX[c].matrix(a);
          const Eigen::Matrix2d ms = hXi[c].matrix(a);
          w[c] = m(i, j);
          ws[c] = ms(i, j);
        }
        const Eigen::VectorXd coef = luB.solve(w);
        const Eigen::VectorXd coefs = luBs.solve(ws);
        if (!coef.allFinite() || !coefs.allFinite())
          throw numeric_error("frame: near-singular moving basis at a node");
        for (int k = 0; k < td; ++k) {
          const double gk = coef[k] + round_coeff(grid, a, i, j, k);
          const double gsk = coefs[k] + round_coeff(grid, a, i, j, k);
          fr.christoffel[k](a, pack(i, j, td)) = gk;
          fr.christoffel[k](a, pack(j, i, td)) =
              gk - round_coeff(grid, a, i, j, k) + round_coeff(grid, a, j, i, k);
          fr.christoffel_star[k](a, pack(i, j, td)) = gsk;
          fr.christoffel_star[k](a, pack(j, i, td)) =
              gsk - round_coeff(grid, a, i, j, k) + round_coeff(grid, a, j, i, k);
        }
        trans_res = std::max(trans_res, std::abs(coef[td] + ga(i, j)));
        // conormal transversal recovers -g as well (conjugacy of the metric)
        const double gs = -coefs[td];
        if (i == j)
          fr.g_star(a, (fr.g.cols() == 3 && i == 1) ? 2 : 0) = gs;
        else
          fr.g_star(a, 1) = gs;
        metric_gap = std::max(metric_gap, std::abs(gs - ga(i, j)));
      }
  }
  fr.transversal_residual = trans_res;
  fr.metric_agreement = metric_gap;
  if (opt.enforce && trans_res > opt.defining_tol)
    throw numeric_error("frame: transversal defining-relation residual " +
                        std::to_string(trans_res) + " exceeds tolerance; the grid "
                        "resolution is too low for this body");
  return fr;
}

ScalarField curvature_density(const SupportField& field) {
  const int N = field.grid->node_count();
  Eigen::VectorXd v(N);
  for (int a = 0; a < N; ++a) v[a] = field.d2h_det(a);
  return ScalarField(field.grid, std::move(v));
}

ScalarField measure_density(const SupportField& field, double p) {
  const int N = field.grid->node_count();
  Eigen::VectorXd v(N);
  for (int a = 0; a < N; ++a) v[a] = std::pow(field.h[a], 1.0 - p) * field.d2h_det(a);
  return ScalarField(field.grid, std::move(v));
}

ScalarField cone_volume_density(const SupportField& field) {
  const int N = field.grid->node_count();
  Eigen::VectorXd v(N);
  for (int a = 0; a < N; ++a) v[a] = field.h[a] * field.d2h_det(a) / field.grid->dim;
  return ScalarField(field.grid, std::move(v));
}

double volume(const SupportField& field) {
  return integrate(*field.grid, cone_volume_density(field));
}

Eigen::MatrixXd anisotropic_metric(const CentroAffineFrame& fr, int node) {
  const int n = fr.grid->dim;
  Eigen::MatrixXd B = fr.frame_basis(node);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
  const Eigen::Matrix2d ga = fr.g_matrix(node);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) S(i, j) = ga(i, j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible()) throw numeric_error("anisotropic_metric: singular moving basis");
  Eigen::MatrixXd Binv = lu.inverse();
  Eigen::MatrixXd P = Binv.transpose() * S * Binv;
  return 0.5 * (P + P.transpose());
}

namespace {

PinchingReport pinching_identity(const CentroAffineFrame& fr) {
  PinchingReport r;
  const int n = fr.grid->dim;
  r.ell = Eigen::MatrixXd::Identity(n, n);
  r.alpha = std::numeric_limits<double>::infinity();
  r.beta = -std::numeric_limits<double>::infinity();
  const int N = fr.grid->node_count();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (int a = 0; a < N; ++a) {
    es.compute(anisotropic_metric(fr, a), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < r.alpha) {
      r.alpha = lo;
      r.argmin = a;
    }
    if (hi > r.beta) {
      r.beta = hi;
      r.argmax = a;
    }
  }
  if (!(r.alpha > 0)) throw numeric_error("pinching: anisotropic metric not positive");
  r.gamma = r.beta / r.alpha;
  r.p_gamma = 1.0 - (n + 1.0) / r.gamma;
  return r;
}

double gamma_of_map(const CentroAffineFrame& fr, const Eigen::MatrixXd& ell,
                    const PinchingOptions& opt) {
  BodySpec mapped = fr.field.spec.with_ell(ell);
  SupportField sf = sample(mapped, fr.grid, opt.sample);
  FrameOptions fo = opt.frame;
  fo.enforce = false;
  CentroAffineFrame mf = frame(sf, fo);
  return pinching_identity(mf).gamma;
}

}  // namespace

PinchingReport pinching_with_map(const CentroAffineFrame& fr, const Eigen::MatrixXd& ell,
                                 const PinchingOptions& opt) {
  const int n = fr.grid->dim;
  if (ell.isIdentity(0.0)) {
    PinchingReport r = pinching_identity(fr);
    return r;
  }
  BodySpec mapped = fr.field.spec.with_ell(ell);
  SupportField sf = sample(mapped, fr.grid, opt.sample);
  CentroAffineFrame mf = frame(sf, opt.frame);
  PinchingReport r = pinching_identity(mf);
  r.ell = ell;
  r.p_gamma = 1.0 - (n + 1.0) / r.gamma;
  return r;
}

PinchingReport pinching(const CentroAffineFrame& fr, EllMode mode,
                        const PinchingOptions& opt) {
  const int n = fr.grid->dim;
  if (mode == EllMode::identity) return pinching_identity(fr);

  try {
    if (mode == EllMode::isotropic) {
      // normalize the second moments of the cone-volume measure
      const int N = fr.grid->node_count();
      Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
      const ScalarField rho = cone_volume_density(fr.field);
      for (int a = 0; a < N; ++a)
        Q += fr.grid->weights[a] * rho.values[a] *
             (fr.X.row(a).transpose() * fr.X.row(a));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
      Eigen::MatrixXd ell = es.operatorInverseSqrt();
      ell /= std::pow(std::abs(ell.determinant()), 1.0 / n);
      return pinching_with_map(fr, ell, opt);
    }

    // axis scaling: coordinate descent over diagonal maps, first axis fixed
    Eigen::VectorXd logd = Eigen::VectorXd::Zero(n);
    auto eval = [&](const Eigen::VectorXd& ld) {
      Eigen::MatrixXd ell = Eigen::MatrixXd::Identity(n, n);
      for (int i = 0; i < n; ++i) ell(i, i) = std::exp(ld[i]);
      return gamma_of_map(fr, ell, opt);
    };
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
      for (int axis = 1; axis < n; ++axis) {
        double lo = logd[axis] - std::log(8.0), hi = logd[axis] + std::log(8.0);
        if (sweep > 0) {
          lo = logd[axis] - 0.5;
          hi = logd[axis] + 0.5;
        }
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        Eigen::VectorXd ld = logd;
        ld[axis] = x1;
        double f1 = eval(ld);
        ld[axis] = x2;
        double f2 = eval(ld);
        while (hi - lo > opt.search_tol) {
          if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            ld[axis] = x1;
            f1 = eval(ld);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            ld[axis] = x2;
            f2 = eval(ld);
          }
        }
        logd[axis] = 0.5 * (lo + hi);
      }
    }
    Eigen::MatrixXd ell = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) ell(i, i) = std::exp(logd[i]);
    PinchingReport r = pinching_with_map(fr, ell, opt);
    PinchingReport id = pinching_identity(fr);
    if (r.gamma > id.gamma) {
      id.search_failed = true;
      return id;
    }
    return r;
  } catch (const std::exception&) {
    PinchingReport r = pinching_identity(fr);
    r.search_failed = true;
    return r;
  }
}

HessStarResult hess_star(const CentroAffineFrame& fr, const ScalarField& f,
                         const DiffOptions& opt) {
  const auto& grid = *fr.grid;
  const int N = grid.node_count();
  const int td = grid.tangent_dim();
  auto d = differentiate(grid, f, opt);

  HessStarResult out;
  out.hess.grid = fr.grid;
  out.hess.comp = d.hess.comp;
  Eigen::VectorXd tr(N);
  for (int a = 0; a < N; ++a) {
    Eigen::Matrix2d H = d.hess.matrix(a);
    for (int i = 0; i < td; ++i)
      for (int j = 0; j < td; ++j)
        for (int k = 0; k < td; ++k)
          H(i, j) -= fr.conn_star_diff(a, i, j, k) * d.grad.comp(a, k);
    out.hess.comp(a, 0) = H(0, 0);
    if (td == 2) {
      out.hess.comp(a, 1) = 0.5 * (H(0, 1) + H(1, 0));
      out.hess.comp(a, 2) = H(1, 1);
    }
    const Eigen::Matrix2d gi = fr.g_inverse(a);
    double t = 0.0;
    for (int i = 0; i < td; ++i)
      for (int j = 0; j < td; ++j) t += gi(i, j) * H(i, j);
    tr[a] = t;
  }
  out.trace_g = ScalarField(fr.grid, std::move(tr));
  return out;
}

double conjugate_identity_residual(const CentroAffineFrame& fr, std::uint64_t seed) {
  const auto& grid = *fr.grid;
  const int N = grid.node_count();
  const int td = grid.tangent_dim();
  const DiffOptions relaxed{1e-8, false};

  if (grid.dim == 2) {
    // literal index form: nabla_i (g^{jk} w_k) = g^{jk} nabla*_i w_k
    ScalarField omega = random_band_limited(fr.grid, std::min(10, grid.degree / 4), seed);
    Eigen::VectorXd V(N);
    for (int a = 0; a < N; ++a) V[a] = omega.values[a] / fr.g(a, 0);
    auto dV = differentiate(grid, ScalarField(fr.grid, V), relaxed);
    auto dw = differentiate(grid, omega, relaxed);
    double res = 0.0;
    for (int a = 0; a < N; ++a) {
      const double lhs = dV.grad.comp(a, 0) + fr.christoffel[0](a, 0) * V[a];
      const double rhs =
          (dw.grad.comp(a, 0) - fr.conn_star_diff(a, 0, 0, 0) * omega.values[a]) / fr.g(a, 0);
      res = std::max(res, std::abs(lhs - rhs));
    }
    return res;
  }

  // product-rule form with projected constant fields:
  // e_k( g(v,w) ) = g(nabla_{e_k} v, w) + g(v, nabla*_{e_k} w)
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return 2.0 * ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0; };
  Eigen::Vector3d av(unit(), unit(), unit()), bv(unit(), unit(), unit());
  av.normalize();
  bv.normalize();

  Eigen::MatrixXd vcomp(N, td), wcomp(N, td);
  Eigen::VectorXd adot(N), bdot(N), s(N);
  for (int a = 0; a < N; ++a) {
    const Eigen::Vector3d th = grid.nodes.row(a).transpose();
    adot[a] = av.dot(th);
    bdot[a] = bv.dot(th);
    for (int i = 0; i < td; ++i) {
      const Eigen::Vector3d ei = grid.frames[i].row(a).transpose();
      vcomp(a, i) = av.dot(ei);
      wcomp(a, i) = bv.dot(ei);
    }
    const Eigen::Matrix2d ga = fr.g_matrix(a);
    s[a] = vcomp.row(a) * ga * wcomp.row(a).transpose();
  }
  auto ds = differentiate(grid, ScalarField(fr.grid, s), relaxed);

  double res = 0.0;
  for (int a = 0; a < N; ++a) {
    const Eigen::Matrix2d ga = fr.g_matrix(a);
    for (int k = 0; k < td; ++k) {
      // nabla-bar of a projected constant field along e_k is -<a,theta> e_k
      Eigen::Vector2d dv = Eigen::Vector2d::Zero(), dw = Eigen::Vector2d::Zero();
      dv[k] -= adot[a];
      dw[k] -= bdot[a];
      for (int i = 0; i < td; ++i)
        for (int m = 0; m < td; ++m) {
          dv[i] += (fr.christoffel[i](a, pack(k, m, td)) - round_coeff(grid, a, k, m, i)) *
                   vcomp(a, m);
          dw[i] += fr.conn_star_diff(a, k, m, i) * wcomp(a, m);
        }
      double rhs = 0.0;
      for (int i = 0; i < td; ++i)
        for (int j = 0; j < td; ++j)
          rhs += ga(i, j) * (dv[i] * wcomp(a, j) + vcomp(a, i) * dw[j]);
      res = std::max(res, std::abs(ds.grad.comp(a, k) - rhs));
    }
  }
  return res;
}

}  // namespace hbm
