#include "hbm/flow.hpp"

#include <cmath>
#include <limits>

#include "transform.hpp"

namespace hbm {

namespace {

struct Curvature {
  Eigen::VectorXd inv_kappa;  // det D2h
  double min_eig = 0.0;       // min eigenvalue of D2h over nodes
  double max_inv_d2h = 0.0;   // max eigenvalue of (D2h)^{-1}
};

// direct evaluation avoiding SupportField/spec plumbing inside the hot loop
Curvature curvature_values(const SphereGrid& grid, GridPtr gp, const Eigen::VectorXd& h) {
  auto d = differentiate(grid, ScalarField(gp, h), DiffOptions{1e-8, false});
  const int N = grid.node_count();
  Curvature out;
  out.inv_kappa.resize(N);
  out.min_eig = std::numeric_limits<double>::infinity();
  out.max_inv_d2h = 0.0;
  for (int a = 0; a < N; ++a) {
    double det, emin, emax;
    if (grid.dim == 2) {
      det = d.hess.comp(a, 0) + h[a];
      emin = emax = det;
    } else {
      const double t00 = d.hess.comp(a, 0) + h[a];
      const double t01 = d.hess.comp(a, 1);
      const double t11 = d.hess.comp(a, 2) + h[a];
      det = t00 * t11 - t01 * t01;
      const double mid = 0.5 * (t00 + t11);
      const double disc = std::sqrt(std::max(0.0, mid * mid - det));
      emin = mid - disc;
      emax = mid + disc;
    }
    out.inv_kappa[a] = det;
    out.min_eig = std::min(out.min_eig, emin);
    if (emin > 0.0) out.max_inv_d2h = std::max(out.max_inv_d2h, 1.0 / emin);
    (void)emax;
  }
  return out;
}

double volume_of(const SphereGrid& grid, const Eigen::VectorXd& h,
                 const Eigen::VectorXd& inv_kappa) {
  return grid.weights.dot(h.cwiseProduct(inv_kappa)) / grid.dim;
}

double max_mode_eigenvalue(const SphereGrid& grid) {
  if (grid.dim == 2) {
    const double k = grid.resolution / 2.0;
    return k * k;
  }
  const double L = grid.transform->analysis_degree();
  return L * (L + 1.0);
}

}  // namespace

SelfSimilarity selfsim_residual(const Eigen::VectorXd& density_L,
                                const Eigen::VectorXd& density_K, const SphereGrid& grid) {
  SelfSimilarity out;
  const Eigen::VectorXd& w = grid.weights;
  const double bb = w.dot(density_K.cwiseProduct(density_K));
  const double ab = w.dot(density_L.cwiseProduct(density_K));
  const double aa = w.dot(density_L.cwiseProduct(density_L));
  out.c_opt = ab / bb;
  const double dist2 = std::max(0.0, aa - 2.0 * out.c_opt * ab + out.c_opt * out.c_opt * bb);
  out.residual = std::sqrt(dist2 / aa);
  return out;
}

SelfSimilarity selfsim_residual(const SupportField& L, const SupportField& K, double p) {
  if (L.grid.get() != K.grid.get())
    throw input_error("selfsim_residual: fields live on different grids");
  return selfsim_residual(measure_density(L, p).values, measure_density(K, p).values, *L.grid);
}

FlowState init_flow(const SupportField& K, const SupportField& L0, double p) {
  if (K.grid.get() != L0.grid.get()) throw input_error("init_flow: grids differ");
  const int n = K.grid->dim;
  if (!(p > -double(n) && p < 1.0)) throw input_error("init_flow: p must lie in (-n, 1)");
  FlowState s;
  s.grid = K.grid;
  s.h = L0.h;
  s.rho = measure_density(K, p).values;
  s.p = p;
  s.alpha = 1.0 / (1.0 - p);
  auto cv = curvature_values(*s.grid, s.grid, s.h);
  if (!(cv.min_eig > 0.0)) throw input_error("init_flow: initial body is not convex");
  s.volume0 = volume_of(*s.grid, s.h, cv.inv_kappa);
  return s;
}

bool flow_step(FlowState& state, double& dt, const FlowOptions& opt) {
  const auto& grid = *state.grid;
  auto cv = curvature_values(grid, state.grid, state.h);
  if (!(cv.min_eig > 0.0)) return false;

  // speed = (rho / det D2h)^alpha
  const int N = grid.node_count();
  Eigen::VectorXd speed(N);
  double max_speed = 0.0;
  for (int a = 0; a < N; ++a) {
    speed[a] = std::pow(state.rho[a] / cv.inv_kappa[a], state.alpha);
    max_speed = std::max(max_speed, speed[a]);
  }

  // parabolic stability bound: the curvature term linearizes to
  // alpha * speed * (D2h)^{-1} acting on the highest resolvable mode
  const double stiff = state.alpha * max_speed * cv.max_inv_d2h * max_mode_eigenvalue(grid);
  const double dt_cfl = opt.cfl * 2.0 / std::max(stiff, 1e-300);
  dt = std::min(dt <= 0.0 ? dt_cfl : dt * 2.0, dt_cfl);

  for (int retry = 0; retry <= opt.max_retries; ++retry) {
    Eigen::VectorXd h_new = state.h - dt * speed;
    if (h_new.minCoeff() > 0.0) {
      auto cv_new = curvature_values(grid, state.grid, h_new);
      if (cv_new.min_eig > 0.0) {
        const double V = volume_of(grid, h_new, cv_new.inv_kappa);
        const double scale = std::pow(state.volume0 / V, 1.0 / grid.dim);
        h_new *= scale;
        const double dh = (h_new - state.h).cwiseAbs().maxCoeff();
        state.rel_change = dh / (dt * std::max(state.h.cwiseAbs().maxCoeff(), 1e-300));
        state.h = std::move(h_new);
        state.time += dt;
        ++state.steps;

        Eigen::VectorXd dens(N);
        for (int a = 0; a < N; ++a)
          dens[a] = std::pow(state.h[a], 1.0 - state.p) * cv_new.inv_kappa[a] *
                    std::pow(scale, (1.0 - state.p) + (grid.dim - 1));
        auto ss = selfsim_residual(dens, state.rho, grid);
        state.residual = ss.residual;
        state.c_opt = ss.c_opt;
        return true;
      }
    }
    dt *= 0.5;
  }
  return false;
}

FlowRun run_flow(const SupportField& K, const SupportField& L0, double p,
                 const FlowOptions& opt) {
  FlowRun run;
  run.state = init_flow(K, L0, p);
  run.h_initial = L0.h;
  double dt = -1.0;
  for (long k = 0; k < opt.max_steps; ++k) {
    if (!flow_step(run.state, dt, opt)) {
      run.note = "convexity lost; dt retry budget exhausted at step " +
                 std::to_string(run.state.steps);
      return run;
    }
    if (opt.series_stride > 0 && run.state.steps % opt.series_stride == 0) {
      auto cv = curvature_values(*run.state.grid, run.state.grid, run.state.h);
      run.series.push_back({run.state.time, volume_of(*run.state.grid, run.state.h, cv.inv_kappa),
                            run.state.residual, run.state.rel_change});
    }
    if (run.state.rel_change < opt.conv_rel_change) {
      run.converged = true;
      return run;
    }
  }
  run.note = "step budget exhausted";
  return run;
}

UniquenessReport uniqueness_experiment(const BodySpec& K, double p,
                                       const std::vector<BodySpec>& initials, long budget,
                                       const GridPtr& grid, const UniquenessOptions& opt) {
  const int n = grid->dim;
  UniquenessReport rep;
  rep.p = p;
  rep.uniqueness_tol = opt.uniqueness_tol;

  if (p == -double(n)) {
    rep.refused = true;
    rep.note =
        "p = -n is the critical exponent: the centro-affine curvature of every "
        "centered ellipsoid is constant, so no uniqueness verdict is possible";
    return rep;
  }
  if (!(p > -double(n) && p < 1.0))
    throw input_error("uniqueness_experiment: p must lie in (-n, 1)");

  SupportField fK = sample(K, grid);
  if (!validate(fK).pass) throw input_error("uniqueness_experiment: target body invalid");

  FlowOptions fopt = opt.flow;
  fopt.max_steps = budget > 0 ? budget : fopt.max_steps;

  for (size_t i = 0; i < initials.size(); ++i) {
    if (initials[i].dim != n) throw input_error("uniqueness_experiment: dimension mismatch");
    SupportField fL = sample(initials[i], grid);
    if (!validate(fL).pass)
      throw input_error("uniqueness_experiment: initial body " + std::to_string(i) +
                        " invalid");
    FlowRun run = run_flow(fK, fL, p, fopt);
    UniquenessRun ur;
    ur.initial_name = initials[i].family_name() + "#" + std::to_string(i);
    ur.converged = run.converged;
    ur.steps = run.state.steps;
    ur.residual = run.state.residual;
    ur.c_opt = run.state.c_opt;
    ur.series = std::move(run.series);
    // normalize the limit to unit volume for comparability across initials
    auto cv_h = run.state.h;
    SupportField limit = fL;
    limit.h = cv_h;
    {
      ScalarField lf(grid, cv_h);
      auto d = differentiate(*grid, lf, DiffOptions{1e-8, false});
      Eigen::VectorXd ik(grid->node_count());
      for (int a = 0; a < grid->node_count(); ++a) {
        if (grid->dim == 2) {
          ik[a] = d.hess.comp(a, 0) + cv_h[a];
        } else {
          const double t00 = d.hess.comp(a, 0) + cv_h[a];
          const double t11 = d.hess.comp(a, 2) + cv_h[a];
          ik[a] = t00 * t11 - d.hess.comp(a, 1) * d.hess.comp(a, 1);
        }
      }
      const double V = grid->weights.dot(cv_h.cwiseProduct(ik)) / n;
      ur.h_limit = cv_h / std::pow(V, 1.0 / n);
    }
    rep.runs.push_back(std::move(ur));
  }

  double worst = 0.0;
  bool all_converged = !rep.runs.empty();
  for (size_t i = 0; i < rep.runs.size(); ++i) {
    all_converged = all_converged && rep.runs[i].converged;
    for (size_t j = i + 1; j < rep.runs.size(); ++j) {
      if (!rep.runs[i].converged || !rep.runs[j].converged) continue;
      worst = std::max(worst,
                       (rep.runs[i].h_limit - rep.runs[j].h_limit).cwiseAbs().maxCoeff());
    }
  }
  rep.max_pairwise_sup = worst;
  rep.unique_within_tol = all_converged && worst <= opt.uniqueness_tol;

  // certificate for the target body, for the consistency column
  CentroAffineFrame fr = frame(fK);
  PinchingReport pin = pinching(fr, EllMode::identity);
  SpectralResult spec = spectrum_with_convergence(fr, opt.spectral_degree, Parity::any);
  rep.certificate = certify(K.family_name(), n, pin, spec, p, opt.certify);
  rep.certificate_consistent =
      rep.certificate.status == CertStatus::not_certified || !all_converged ||
      rep.unique_within_tol;
  return rep;
}

}  // namespace hbm
