#include "hbm/certify.hpp"

#include <cmath>

namespace hbm {

double p_gamma(int n, double gamma) {
  if (!(gamma >= 1.0)) throw input_error("p_gamma: gamma must be >= 1");
  return 1.0 - (n + 1.0) / gamma;
}

double cert_poly(int n, double sigma, double tau, double t) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw input_error("cert_poly: sigma must be in (0,1]");
  const double b = n + 1.0 + (n - 1.0) * sigma - (tau - 2.0) * (tau - 2.0);
  const double c = (n - 1.0) * tau * tau * (1.0 - sigma);
  return t * t - b * t + c;
}

namespace {

// right root of P_{sigma,tau}; requires P_{sigma,tau}(n-1) < 0, which forces
// real roots straddling n-1
double right_root(int n, double sigma, double tau) {
  const double b = n + 1.0 + (n - 1.0) * sigma - (tau - 2.0) * (tau - 2.0);
  const double c = (n - 1.0) * tau * tau * (1.0 - sigma);
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) return -1.0;
  return 0.5 * (b + std::sqrt(disc));
}

bool admissible(int n, double sigma, double tau) {
  return cert_poly(n, sigma, tau, n - 1.0) < 0.0;
}

}  // namespace

ImprovedBound improved_lower_bound(int n, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0))
    throw input_error("improved_lower_bound: sigma must be in (0,1]");

  // tau = sigma + 1 is always admissible: P_{s,s+1}(n-1) = -(n-1) s (s^2 + n) < 0
  ImprovedBound best;
  best.tau_star = sigma + 1.0;
  best.value = right_root(n, sigma, best.tau_star);

  constexpr double tau_lo = 0.5, tau_hi = 6.0;
  const int scan = 551;
  double grid_best_tau = best.tau_star;
  double grid_best = best.value;
  for (int i = 0; i < scan; ++i) {
    const double tau = tau_lo + (tau_hi - tau_lo) * i / (scan - 1);
    if (!admissible(n, sigma, tau)) continue;
    const double r = right_root(n, sigma, tau);
    if (r > grid_best) {
      grid_best = r;
      grid_best_tau = tau;
    }
  }

  // golden-section refinement around the scan winner
  const double step = (tau_hi - tau_lo) / (scan - 1);
  double lo = std::max(tau_lo, grid_best_tau - step);
  double hi = std::min(tau_hi, grid_best_tau + step);
  auto value_at = [&](double tau) {
    return admissible(n, sigma, tau) ? right_root(n, sigma, tau) : -1.0;
  };
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = value_at(x1), f2 = value_at(x2);
  while (hi - lo > 1e-8) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = value_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = value_at(x2);
    }
  }
  const double refined_tau = 0.5 * (lo + hi);
  const double refined = value_at(refined_tau);
  if (refined > best.value) {
    best.value = refined;
    best.tau_star = refined_tau;
  } else if (grid_best > best.value) {
    best.value = grid_best;
    best.tau_star = grid_best_tau;
  }
  return best;
}

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::by_pinching:
      return "certified-by-pinching";
    case CertStatus::by_spectrum:
      return "certified-by-spectrum";
    default:
      return "not-certified";
  }
}

Certificate certify(const std::string& body_id, int dim, const PinchingReport& pinch,
                    const SpectralResult& spec, double p, const CertifyOptions& opt) {
  const int n = dim;
  if (!(p >= -double(n) && p < 1.0))
    throw input_error("certify: p must lie in [-n, 1)");

  Certificate c;
  c.body_id = body_id;
  c.dim = n;
  c.p = p;
  c.margin_tol = opt.margin_tol;

  c.gamma = pinch.gamma;
  c.p_gamma_value = pinch.p_gamma;
  // the theorem's range is [p_gamma, 1) inside the open interval (-n, 1)
  c.pinching_pass = p > -double(n) && p >= c.p_gamma_value;

  c.lambda1_even = spec.lambda1_even;
  c.spectral_margin = spec.lambda1_even - (n - p);
  c.spectral_converged = spec.converged;
  c.spectral_pass = p > -double(n) && c.spectral_margin > opt.margin_tol;

  if (c.pinching_pass)
    c.status = CertStatus::by_pinching;
  else if (c.spectral_pass)
    c.status = CertStatus::by_spectrum;
  else
    c.status = CertStatus::not_certified;
  return c;
}

MinkowskiGap minkowski_inequality(const SupportField& K, const SupportField& L, double p) {
  if (K.grid.get() != L.grid.get())
    throw input_error("minkowski_inequality: bodies live on different grids");
  const int n = K.grid->dim;
  if (!(p > -double(n) && p <= 1.0))
    throw input_error("minkowski_inequality: p must lie in (-n, 1]");

  const auto& grid = *K.grid;
  const double VK = volume(K), VL = volume(L);
  MinkowskiGap out;
  if (p == 0.0) {
    Eigen::VectorXd density = cone_volume_density(K).values;
    Eigen::VectorXd logr = (L.h.array() / K.h.array()).log();
    out.lhs = integrate(grid, Eigen::VectorXd(density.cwiseProduct(logr))) / VK;
    out.rhs = std::log(VL / VK) / n;
  } else {
    Eigen::VectorXd sp = measure_density(K, p).values;  // h_K^{1-p}/kappa_K
    Eigen::VectorXd hLp = L.h.array().pow(p);
    out.lhs = integrate(grid, Eigen::VectorXd(sp.cwiseProduct(hLp))) / p;
    out.rhs = (n / p) * std::pow(VK, 1.0 - p / n) * std::pow(VL, p / n);
  }
  out.gap = out.lhs - out.rhs;
  return out;
}

}  // namespace hbm
