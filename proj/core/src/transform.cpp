#include "transform.hpp"

#include <cmath>

#include "hbm/sphere.hpp"

namespace hbm::detail {

namespace {
constexpr double kPi = 3.14159265358979323846;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;
}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    // i-th root counted from x = +1 downwards
    double r = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre P_n(r) and derivative by three-term recurrence
      double p0 = 1.0, p1 = r;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * r * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (r * p1 - p0) / (r * r - 1.0);
      double step = p1 / dp;
      r -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // one polishing evaluation of the derivative at the converged root
    {
      double p0 = 1.0, p1 = r;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * r * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (r * p1 - p0) / (r * r - 1.0);
    }
    const double weight = 2.0 / ((1.0 - r * r) * dp * dp);
    x[n - 1 - i] = r;
    x[i] = -r;  // exact mirror
    w[n - 1 - i] = weight;
    w[i] = weight;
  }
  if (n % 2 == 1) {
    x[half] = 0.0;
    double p0 = 1.0, p1 = 0.0;  // P_k(0)
    for (int k = 2; k <= n; ++k) {
      double p2 = (-(k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (-p0) / (-1.0);
    w[half] = 2.0 / (dp * dp);
  }
}

LegendreTables build_legendre_tables(const Eigen::VectorXd& x, int max_degree) {
  LegendreTables t;
  const int L = max_degree;
  const int nx = static_cast<int>(x.size());
  t.max_degree = L;
  t.val.resize(L + 1);
  t.dtheta.resize(L + 1);
  t.d2theta.resize(L + 1);

  Eigen::VectorXd sin_th(nx), cot_th(nx);
  for (int i = 0; i < nx; ++i) {
    sin_th[i] = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    cot_th[i] = x[i] / sin_th[i];
  }

  // seed column P_mm carried across m
  Eigen::VectorXd pmm = Eigen::VectorXd::Constant(nx, 1.0 / std::sqrt(2.0));
  for (int m = 0; m <= L; ++m) {
    const int cnt = L - m + 1;
    Eigen::MatrixXd& V = t.val[m];
    V.resize(nx, cnt);
    V.col(0) = pmm;
    if (cnt > 1) V.col(1) = std::sqrt(2.0 * m + 3.0) * x.cwiseProduct(pmm);
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((2.0 * l + 1.0) * (2.0 * l - 1.0) /
                                 (double(l - m) * double(l + m)));
      const double b = std::sqrt((2.0 * l + 1.0) * (l - 1.0 + m) * (l - 1.0 - m) /
                                 ((2.0 * l - 3.0) * double(l - m) * double(l + m)));
      V.col(l - m) = a * x.cwiseProduct(V.col(l - m - 1)) - b * V.col(l - m - 2);
    }

    // d/dtheta via (l x Pbar_lm - e_lm Pbar_{l-1,m}) / sin(theta)
    Eigen::MatrixXd& D = t.dtheta[m];
    D.resize(nx, cnt);
    for (int l = m; l <= L; ++l) {
      Eigen::VectorXd num = double(l) * x.cwiseProduct(V.col(l - m));
      if (l > m) {
        const double e = std::sqrt((2.0 * l + 1.0) * double(l - m) * double(l + m) /
                                   (2.0 * l - 1.0));
        num -= e * V.col(l - m - 1);
      }
      D.col(l - m) = num.cwiseQuotient(sin_th);
    }

    // d2/dtheta2 from the associated Legendre ODE
    Eigen::MatrixXd& D2 = t.d2theta[m];
    D2.resize(nx, cnt);
    for (int l = m; l <= L; ++l) {
      for (int i = 0; i < nx; ++i) {
        const double ll1 = double(l) * (l + 1.0);
        const double mm = double(m) * m / (sin_th[i] * sin_th[i]);
        D2(i, l - m) = -cot_th[i] * D(i, l - m) - (ll1 - mm) * V(i, l - m);
      }
    }

    if (m < L) pmm = std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * sin_th.cwiseProduct(pmm);
  }
  return t;
}

HarmonicTransform::HarmonicTransform(const SphereGrid& grid) : dim_(grid.dim) {
  if (dim_ == 2) {
    const int m = grid.resolution;
    degree_ = m / 2;
    cos_tab_.resize(m, degree_ + 1);
    sin_tab_.resize(m, degree_ + 1);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k <= degree_; ++k) {
        cos_tab_(j, k) = std::cos(k * grid.phis[j]);
        sin_tab_(j, k) = std::sin(k * grid.phis[j]);
      }
  } else {
    n_lat_ = grid.n_lat;
    n_lon_ = grid.n_lon;
    degree_ = n_lat_ - 1;
    ring_w_ = grid.ring_w;
    cos_tab_.resize(n_lon_, degree_ + 1);
    sin_tab_.resize(n_lon_, degree_ + 1);
    for (int j = 0; j < n_lon_; ++j)
      for (int m = 0; m <= degree_; ++m) {
        cos_tab_(j, m) = std::cos(m * grid.phis[j]);
        sin_tab_(j, m) = std::sin(m * grid.phis[j]);
      }
    sin_theta_.resize(n_lat_);
    cot_theta_.resize(n_lat_);
    for (int i = 0; i < n_lat_; ++i) {
      sin_theta_[i] = std::sqrt(std::max(0.0, 1.0 - grid.ring_x[i] * grid.ring_x[i]));
      cot_theta_[i] = grid.ring_x[i] / sin_theta_[i];
    }
    leg_ = build_legendre_tables(grid.ring_x, degree_);
  }
}

SphereCoeffs HarmonicTransform::analyze(const Eigen::VectorXd& f) const {
  SphereCoeffs c;
  if (dim_ == 2) {
    const int m = static_cast<int>(f.size());
    c.ccos = Eigen::MatrixXd::Zero(1, degree_ + 1);
    c.csin = Eigen::MatrixXd::Zero(1, degree_ + 1);
    Eigen::VectorXd fc = cos_tab_.transpose() * f;
    Eigen::VectorXd fs = sin_tab_.transpose() * f;
    for (int k = 0; k <= degree_; ++k) {
      const double scale = (k == 0 || k == degree_) ? 1.0 / m : 2.0 / m;
      c.ccos(0, k) = scale * fc[k];
      c.csin(0, k) = (k == 0 || k == degree_) ? 0.0 : (2.0 / m) * fs[k];
    }
    return c;
  }
  const int L = degree_;
  c.ccos = Eigen::MatrixXd::Zero(L + 1, L + 1);
  c.csin = Eigen::MatrixXd::Zero(L + 1, L + 1);
  ConstRowMap F(f.data(), n_lat_, n_lon_);
  Eigen::MatrixXd Fc = F * cos_tab_;  // n_lat x (L+1)
  Eigen::MatrixXd Fs = F * sin_tab_;
  const double s0 = std::sqrt(2.0 * kPi) / n_lon_;
  const double sm = 2.0 * std::sqrt(kPi) / n_lon_;
  for (int m = 0; m <= L; ++m) {
    const double s = (m == 0) ? s0 : sm;
    Eigen::VectorXd wc = ring_w_.cwiseProduct(Fc.col(m));
    c.ccos.block(m, m, L - m + 1, 1) = s * (leg_.val[m].transpose() * wc);
    if (m >= 1) {
      Eigen::VectorXd ws = ring_w_.cwiseProduct(Fs.col(m));
      c.csin.block(m, m, L - m + 1, 1) = s * (leg_.val[m].transpose() * ws);
    }
  }
  return c;
}

Eigen::VectorXd HarmonicTransform::synth(const SphereCoeffs& c) const {
  if (dim_ == 2) {
    return cos_tab_ * c.ccos.row(0).transpose() + sin_tab_ * c.csin.row(0).transpose();
  }
  const int L = degree_;
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(n_lat_, L + 1);
  Eigen::MatrixXd As = Eigen::MatrixXd::Zero(n_lat_, L + 1);
  for (int m = 0; m <= L; ++m) {
    const double s = (m == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
    Ac.col(m) = s * (leg_.val[m] * c.ccos.block(m, m, L - m + 1, 1));
    if (m >= 1) As.col(m) = s * (leg_.val[m] * c.csin.block(m, m, L - m + 1, 1));
  }
  RowMat F = Ac * cos_tab_.transpose() + As * sin_tab_.transpose();
  return Eigen::Map<const Eigen::VectorXd>(F.data(), n_lat_ * n_lon_);
}

SynthDerivs HarmonicTransform::synth_derivs(const SphereCoeffs& c) const {
  SynthDerivs out;
  if (dim_ == 2) {
    const int m = static_cast<int>(cos_tab_.rows());
    Eigen::VectorXd d1 = Eigen::VectorXd::Zero(m), d2 = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd ac(degree_ + 1), bs(degree_ + 1);
    for (int k = 0; k <= degree_; ++k) {
      ac[k] = k * c.csin(0, k);
      bs[k] = -double(k) * c.ccos(0, k);
    }
    d1 = cos_tab_ * ac + sin_tab_ * bs;
    for (int k = 0; k <= degree_; ++k) {
      ac[k] = -double(k) * k * c.ccos(0, k);
      bs[k] = -double(k) * k * c.csin(0, k);
    }
    d2 = cos_tab_ * ac + sin_tab_ * bs;
    out.grad.resize(m, 1);
    out.grad.col(0) = d1;
    out.hess.resize(m, 1);
    out.hess.col(0) = d2;
    return out;
  }

  const int L = degree_;
  const int N = n_lat_ * n_lon_;
  Eigen::MatrixXd Acv = Eigen::MatrixXd::Zero(n_lat_, L + 1), Asv = Acv,
                  Acd = Acv, Asd = Acv, Acd2 = Acv, Asd2 = Acv, Acl = Acv, Asl = Acv;
  for (int m = 0; m <= L; ++m) {
    const double s = (m == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
    const int cnt = L - m + 1;
    Eigen::VectorXd cc = c.ccos.block(m, m, cnt, 1);
    Eigen::VectorXd lam(cnt);
    for (int l = m; l <= L; ++l) lam[l - m] = -double(l) * (l + 1.0);
    Acv.col(m) = s * (leg_.val[m] * cc);
    Acd.col(m) = s * (leg_.dtheta[m] * cc);
    Acd2.col(m) = s * (leg_.d2theta[m] * cc);
    Acl.col(m) = s * (leg_.val[m] * lam.cwiseProduct(cc));
    if (m >= 1) {
      Eigen::VectorXd cs = c.csin.block(m, m, cnt, 1);
      Asv.col(m) = s * (leg_.val[m] * cs);
      Asd.col(m) = s * (leg_.dtheta[m] * cs);
      Asd2.col(m) = s * (leg_.d2theta[m] * cs);
      Asl.col(m) = s * (leg_.val[m] * lam.cwiseProduct(cs));
    }
  }

  // phi-derivative swaps cos/sin blocks with factors +-m
  auto phi_shift = [&](const Eigen::MatrixXd& Acol, const Eigen::MatrixXd& Asol,
                       Eigen::MatrixXd& Bc, Eigen::MatrixXd& Bs) {
    Bc = Eigen::MatrixXd::Zero(n_lat_, L + 1);
    Bs = Eigen::MatrixXd::Zero(n_lat_, L + 1);
    for (int m = 1; m <= L; ++m) {
      Bc.col(m) = m * Asol.col(m);
      Bs.col(m) = -m * Acol.col(m);
    }
  };

  Eigen::MatrixXd Bc, Bs;
  phi_shift(Acv, Asv, Bc, Bs);
  RowMat f_phi = Bc * cos_tab_.transpose() + Bs * sin_tab_.transpose();
  phi_shift(Acd, Asd, Bc, Bs);
  RowMat f_thphi = Bc * cos_tab_.transpose() + Bs * sin_tab_.transpose();
  RowMat f_th = Acd * cos_tab_.transpose() + Asd * sin_tab_.transpose();
  RowMat f_thth = Acd2 * cos_tab_.transpose() + Asd2 * sin_tab_.transpose();
  RowMat f_lap = Acl * cos_tab_.transpose() + Asl * sin_tab_.transpose();

  out.grad.resize(N, 2);
  out.hess.resize(N, 3);
  for (int i = 0; i < n_lat_; ++i) {
    const double st = sin_theta_[i], ct = cot_theta_[i];
    for (int j = 0; j < n_lon_; ++j) {
      const int a = i * n_lon_ + j;
      out.grad(a, 0) = f_th(i, j);
      out.grad(a, 1) = f_phi(i, j) / st;
      out.hess(a, 0) = f_thth(i, j);
      out.hess(a, 1) = (f_thphi(i, j) - ct * f_phi(i, j)) / st;
      // H_pp from the trace identity tr(H) = lap keeps the pole rings clean
      out.hess(a, 2) = f_lap(i, j) - f_thth(i, j);
    }
  }
  return out;
}

Eigen::VectorXd HarmonicTransform::synth_laplacian(const SphereCoeffs& c) const {
  if (dim_ == 2) {
    SphereCoeffs scaled = c;
    for (int k = 0; k <= degree_; ++k) {
      scaled.ccos(0, k) *= -double(k) * k;
      scaled.csin(0, k) *= -double(k) * k;
    }
    return synth(scaled);
  }
  SphereCoeffs scaled = c;
  for (int m = 0; m <= degree_; ++m)
    for (int l = m; l <= degree_; ++l) {
      scaled.ccos(l, m) *= -double(l) * (l + 1.0);
      scaled.csin(l, m) *= -double(l) * (l + 1.0);
    }
  return synth(scaled);
}

double HarmonicTransform::coeff_energy(const SphereCoeffs& c, int from_degree) const {
  double e = 0.0;
  if (dim_ == 2) {
    for (int k = std::max(0, from_degree); k <= degree_; ++k)
      e += c.ccos(0, k) * c.ccos(0, k) + c.csin(0, k) * c.csin(0, k);
    return e;
  }
  for (int m = 0; m <= degree_; ++m)
    for (int l = std::max(m, from_degree); l <= degree_; ++l)
      e += c.ccos(l, m) * c.ccos(l, m) + c.csin(l, m) * c.csin(l, m);
  return e;
}

double HarmonicTransform::residual(const Eigen::VectorXd& f, const SphereCoeffs& c) const {
  const double fn = f.norm();
  if (fn == 0.0) return 0.0;
  const double recon = (synth(c) - f).norm() / fn;
  const double total = coeff_energy(c, 0);
  const int tail_start = (3 * degree_) / 4 + 1;
  const double tail =
      total > 0.0 ? std::sqrt(coeff_energy(c, tail_start) / total) : 0.0;
  return std::max(recon, tail);
}

}  // namespace hbm::detail
