#pragma once

// Finite-difference oracles, independent of the spectral differentiation
// paths they are used to check.

#include <Eigen/Dense>
#include <cmath>

namespace oracles {

// d/ds f(cos(s) theta + sin(s) u) at s = 0: the covariant gradient component
// along the unit tangent u (geodesic central difference).
template <class F>
double sphere_gradient(F&& f, const Eigen::VectorXd& theta, const Eigen::VectorXd& u,
                       double step) {
  auto at = [&](double s) { return f((std::cos(s) * theta + std::sin(s) * u).eval()); };
  return (at(step) - at(-step)) / (2.0 * step);
}

// Hess f(u,u) along the geodesic through theta with unit speed u.
template <class F>
double sphere_hessian_diag(F&& f, const Eigen::VectorXd& theta, const Eigen::VectorXd& u,
                           double step) {
  auto at = [&](double s) { return f((std::cos(s) * theta + std::sin(s) * u).eval()); };
  return (at(step) - 2.0 * at(0.0) + at(-step)) / (step * step);
}

// Hess f(u,v) for orthonormal u, v by polarization.
template <class F>
double sphere_hessian(F&& f, const Eigen::VectorXd& theta, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& v, double step) {
  const double s2 = std::sqrt(0.5);
  const Eigen::VectorXd wp = s2 * (u + v), wm = s2 * (u - v);
  return 0.5 * (sphere_hessian_diag(f, theta, wp, step) -
                sphere_hessian_diag(f, theta, wm, step));
}

// Ambient central-difference Hessian of f : R^n -> R.
template <class F>
Eigen::MatrixXd ambient_hessian(F&& f, const Eigen::VectorXd& x, double step) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (step * step);
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd a = x, b = x, c = x, d = x;
      a[i] += step;
      a[j] += step;
      b[i] += step;
      b[j] -= step;
      c[i] -= step;
      c[j] += step;
      d[i] -= step;
      d[j] -= step;
      H(i, j) = H(j, i) = (f(a) - f(b) - f(c) + f(d)) / (4.0 * step * step);
    }
  }
  return H;
}

}  // namespace oracles
