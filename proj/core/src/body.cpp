#include "hbm/body.hpp"

#include <cmath>
#include <limits>

namespace hbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double legendre_p(int l, double x) {
  double p0 = 1.0, p1 = x;
  if (l == 0) return p0;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_dp(int l, double x) {
  // (1-x^2) P_l' = l (P_{l-1} - x P_l)
  if (l == 0) return 0.0;
  const double denom = 1.0 - x * x;
  if (denom < 1e-14) {
    // endpoint limit: P_l'(+-1) = (+-1)^{l+1} l(l+1)/2
    const double sgn = (x > 0) ? 1.0 : ((l % 2 == 0) ? -1.0 : 1.0);
    return sgn * 0.5 * l * (l + 1.0);
  }
  return l * (legendre_p(l - 1, x) - x * legendre_p(l, x)) / denom;
}

// 1-homogeneous extension of the (unmapped) family support function.
double family_support(const BodySpec& spec, const Eigen::VectorXd& y) {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return fam.radius * y.norm();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          double s = 0.0;
          for (int i = 0; i < y.size(); ++i)
            s += fam.semi_axes[i] * fam.semi_axes[i] * y[i] * y[i];
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, LpBall>) {
          const double qd = fam.exponent / (fam.exponent - 1.0);
          double s = 0.0;
          for (int i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]), qd);
          return fam.scale * std::pow(s, 1.0 / qd);
        } else {
          const double r = y.norm();
          double v = 1.0;
          if (spec.dim == 2) {
            const double phi = std::atan2(y[1], y[0]);
            for (const auto& [k, c] : fam.modes) v += c * std::cos(k * phi);
          } else {
            const double z = y[2] / r;
            for (const auto& [k, c] : fam.modes) v += c * legendre_p(k, z);
          }
          return fam.base_radius * r * v;
        }
      },
      spec.family);
}

// Ambient gradient of the 1-homogeneous family support function.
Eigen::VectorXd family_support_gradient(const BodySpec& spec, const Eigen::VectorXd& y) {
  return std::visit(
      [&](const auto& fam) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return fam.radius * y.normalized();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Eigen::VectorXd g(y.size());
          double s = 0.0;
          for (int i = 0; i < y.size(); ++i) {
            g[i] = fam.semi_axes[i] * fam.semi_axes[i] * y[i];
            s += g[i] * y[i];
          }
          return g / std::sqrt(s);
        } else if constexpr (std::is_same_v<T, LpBall>) {
          const double qd = fam.exponent / (fam.exponent - 1.0);
          double s = 0.0;
          for (int i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]), qd);
          const double norm = std::pow(s, 1.0 / qd);
          Eigen::VectorXd g(y.size());
          for (int i = 0; i < y.size(); ++i) {
            const double ai = std::abs(y[i]);
            g[i] = (ai == 0.0) ? 0.0
                               : fam.scale * std::copysign(std::pow(ai / norm, qd - 1.0), y[i]);
          }
          return g;
        } else {
          const double r = y.norm();
          const Eigen::VectorXd u = y / r;
          double v = 1.0;
          Eigen::VectorXd gs = Eigen::VectorXd::Zero(y.size());  // sphere gradient of G
          if (spec.dim == 2) {
            const double phi = std::atan2(u[1], u[0]);
            Eigen::Vector2d t(-u[1], u[0]);
            double dv = 0.0;
            for (const auto& [k, c] : fam.modes) {
              v += c * std::cos(k * phi);
              dv += -c * k * std::sin(k * phi);
            }
            gs = dv * t;
          } else {
            const double z = u[2];
            Eigen::Vector3d ez(0, 0, 1);
            Eigen::Vector3d dz = ez - z * u.head<3>();  // sphere gradient of z
            double dv = 0.0;
            for (const auto& [k, c] : fam.modes) {
              v += c * legendre_p(k, z);
              dv += c * legendre_dp(k, z);
            }
            gs = dv * dz;
          }
          return fam.base_radius * (v * u + gs);
        }
      },
      spec.family);
}

bool has_closed_gauge(const BodySpec& spec) {
  return !std::holds_alternative<HarmonicPerturbation>(spec.family);
}

double closed_gauge(const BodySpec& spec, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return x.norm() / fam.radius;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          double s = 0.0;
          for (int i = 0; i < x.size(); ++i) {
            const double t = x[i] / fam.semi_axes[i];
            s += t * t;
          }
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, LpBall>) {
          double s = 0.0;
          for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), fam.exponent);
          return std::pow(s, 1.0 / fam.exponent) / fam.scale;
        } else {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      spec.family);
}

// ||x||_K = max over unit theta of <x,theta> / h(theta): the support of the
// polar body evaluated at x. Coarse scan plus Newton polish on the sphere.
double variational_gauge(const BodySpec& spec, const Eigen::VectorXd& x) {
  const int n = spec.dim;
  auto value = [&](const Eigen::VectorXd& th) { return x.dot(th) / family_support(spec, th); };
  auto sphere_grad = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    const double h = family_support(spec, th);
    const Eigen::VectorXd gh = family_support_gradient(spec, th);
    Eigen::VectorXd g = x / h - (x.dot(th) / (h * h)) * gh;
    return g - g.dot(th) * th;  // tangential part
  };

  // coarse scan
  Eigen::VectorXd best;
  double best_val = -std::numeric_limits<double>::infinity();
  if (n == 2) {
    const int scan = 1024;
    for (int i = 0; i < scan; ++i) {
      const double ph = 2.0 * kPi * i / scan;
      Eigen::Vector2d th(std::cos(ph), std::sin(ph));
      const double v = value(th);
      if (v > best_val) {
        best_val = v;
        best = th;
      }
    }
  } else {
    const int nt = 96, np = 192;
    for (int i = 1; i < nt; ++i) {
      const double t = kPi * i / nt;
      for (int j = 0; j < np; ++j) {
        const double ph = 2.0 * kPi * j / np;
        Eigen::Vector3d th(std::sin(t) * std::cos(ph), std::sin(t) * std::sin(ph), std::cos(t));
        const double v = value(th);
        if (v > best_val) {
          best_val = v;
          best = th;
        }
      }
    }
  }

  // Newton on the first-order condition in a tangent chart, FD Jacobian
  Eigen::VectorXd th = best;
  const int tdim = n - 1;
  for (int iter = 0; iter < 60; ++iter) {
    // frame at th
    Eigen::MatrixXd frame(n, tdim);
    {
      Eigen::VectorXd seed = Eigen::VectorXd::Zero(n);
      seed[(std::abs(th[0]) < 0.9) ? 0 : 1] = 1.0;
      Eigen::VectorXd t1 = seed - seed.dot(th) * th;
      t1.normalize();
      frame.col(0) = t1;
      if (tdim == 2) {
        Eigen::Vector3d t2 = Eigen::Vector3d(th[0], th[1], th[2])
                                 .cross(Eigen::Vector3d(t1[0], t1[1], t1[2]));
        frame.col(1) = t2;
      }
    }
    auto grad_at = [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
      Eigen::VectorXd p = (th + frame * s).normalized();
      Eigen::VectorXd g = sphere_grad(p);
      return frame.transpose() * g;
    };
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(tdim);
    Eigen::VectorXd g0 = grad_at(s0);
    if (g0.norm() < 1e-13 * std::max(1.0, std::abs(best_val))) break;
    Eigen::MatrixXd J(tdim, tdim);
    const double hfd = 1e-6;
    for (int k = 0; k < tdim; ++k) {
      Eigen::VectorXd sp = s0, sm = s0;
      sp[k] += hfd;
      sm[k] -= hfd;
      J.col(k) = (grad_at(sp) - grad_at(sm)) / (2.0 * hfd);
    }
    Eigen::VectorXd step = J.fullPivLu().solve(-g0);
    if (!step.allFinite()) break;
    if (step.norm() > 0.5) step *= 0.5 / step.norm();
    th = (th + frame * step).normalized();
    if (step.norm() < 1e-14) break;
  }
  return std::max(best_val, value(th));
}

void check_ell(const Eigen::MatrixXd& m, int dim) {
  if (m.rows() != dim || m.cols() != dim)
    throw input_error("BodySpec: linear map has wrong shape");
  const double d = m.determinant();
  const double scale = std::max(1.0, std::pow(m.norm(), dim));
  if (!std::isfinite(d) || std::abs(d) < 1e-12 * scale)
    throw input_error("BodySpec: linear map is singular");
}

}  // namespace

BodySpec BodySpec::make_ball(int dim, double radius) {
  if (dim != 2 && dim != 3) throw input_error("BodySpec: dimension must be 2 or 3");
  if (!(radius > 0)) throw input_error("BodySpec: radius must be positive");
  BodySpec s;
  s.dim = dim;
  s.family = Ball{radius};
  return s;
}

BodySpec BodySpec::make_ellipsoid(Eigen::VectorXd semi_axes) {
  const int dim = static_cast<int>(semi_axes.size());
  if (dim != 2 && dim != 3) throw input_error("BodySpec: dimension must be 2 or 3");
  for (int i = 0; i < dim; ++i)
    if (!(semi_axes[i] > 0)) throw input_error("BodySpec: semi-axes must be positive");
  BodySpec s;
  s.dim = dim;
  s.family = Ellipsoid{std::move(semi_axes)};
  return s;
}

BodySpec BodySpec::make_lp_ball(int dim, double exponent, double scale) {
  if (dim != 2 && dim != 3) throw input_error("BodySpec: dimension must be 2 or 3");
  if (!(exponent > 2)) throw input_error("BodySpec: lp exponent must be > 2");
  if (!(scale > 0)) throw input_error("BodySpec: scale must be positive");
  BodySpec s;
  s.dim = dim;
  s.family = LpBall{exponent, scale};
  return s;
}

BodySpec BodySpec::make_harmonic(int dim, double base_radius,
                                 std::vector<std::pair<int, double>> modes) {
  if (dim != 2 && dim != 3) throw input_error("BodySpec: dimension must be 2 or 3");
  if (!(base_radius > 0)) throw input_error("BodySpec: base radius must be positive");
  for (const auto& [k, c] : modes) {
    if (k < 2 || k % 2 != 0)
      throw input_error("BodySpec: harmonic modes must be even degrees >= 2");
    (void)c;
  }
  BodySpec s;
  s.dim = dim;
  s.family = HarmonicPerturbation{base_radius, std::move(modes)};
  return s;
}

BodySpec BodySpec::with_ell(const Eigen::MatrixXd& m) const {
  check_ell(m, dim);
  BodySpec s = *this;
  s.ell = ell ? Eigen::MatrixXd(m * *ell) : m;
  check_ell(*s.ell, dim);
  return s;
}

std::string BodySpec::family_name() const {
  if (std::holds_alternative<Ball>(family)) return "ball";
  if (std::holds_alternative<Ellipsoid>(family)) return "ellipsoid";
  if (std::holds_alternative<LpBall>(family)) return "lp-ball";
  return "harmonic";
}

double support(const BodySpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.dim) throw input_error("support: direction has wrong dimension");
  if (spec.ell) {
    check_ell(*spec.ell, spec.dim);
    return family_support(spec, spec.ell->transpose() * theta);
  }
  return family_support(spec, theta);
}

double gauge(const BodySpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) throw input_error("gauge: point has wrong dimension");
  if (x.norm() == 0.0) throw input_error("gauge: undefined at the origin");
  Eigen::VectorXd y = x;
  if (spec.ell) {
    check_ell(*spec.ell, spec.dim);
    y = spec.ell->fullPivLu().solve(x);
  }
  if (has_closed_gauge(spec)) return closed_gauge(spec, y);
  return variational_gauge(spec, y);
}

double SupportField::d2h_min_eig(int a) const {
  if (d2h.cols() == 1) return d2h(a, 0);
  const double tr = d2h(a, 0) + d2h(a, 2);
  const double diff = 0.5 * (d2h(a, 0) - d2h(a, 2));
  const double disc = std::sqrt(diff * diff + d2h(a, 1) * d2h(a, 1));
  return 0.5 * tr - disc;
}

Eigen::VectorXd SupportField::boundary_point(int a) const {
  return grad_h.ambient(a) + h[a] * grid->nodes.row(a).transpose();
}

SupportField sample(const BodySpec& spec, const GridPtr& grid, const SampleOptions& opt) {
  if (!grid) throw input_error("sample: null grid");
  if (grid->dim != spec.dim) throw input_error("sample: grid and body dimension differ");
  const int N = grid->node_count();
  Eigen::VectorXd h(N);
  for (int a = 0; a < N; ++a) h[a] = support(spec, grid->nodes.row(a).transpose());

  auto d = differentiate(*grid, ScalarField(grid, h), opt.diff);

  SupportField field;
  field.grid = grid;
  field.spec = spec;
  field.h = std::move(h);
  field.diff_residual = d.residual;
  field.d2h = d.hess.comp;
  field.d2h.col(0) += field.h;
  if (field.d2h.cols() == 3) field.d2h.col(2) += field.h;
  field.grad_h = std::move(d.grad);
  field.hess_h = std::move(d.hess);
  return field;
}

ValidityReport validate(const SupportField& field) {
  ValidityReport r;
  const int N = field.grid->node_count();
  r.min_h = std::numeric_limits<double>::infinity();
  r.min_d2h_eig = std::numeric_limits<double>::infinity();
  for (int a = 0; a < N; ++a) {
    if (field.h[a] < r.min_h) {
      r.min_h = field.h[a];
      r.argmin_h = a;
    }
    const double e = field.d2h_min_eig(a);
    if (e < r.min_d2h_eig) {
      r.min_d2h_eig = e;
      r.argmin_eig = a;
    }
  }
  r.pass = r.min_h > 0.0 && r.min_d2h_eig > 0.0;
  return r;
}

}  // namespace hbm
