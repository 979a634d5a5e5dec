#pragma once

#include <string>

#include "hbm/geometry.hpp"
#include "hbm/spectral.hpp"

namespace hbm {

/// p_gamma = 1 - (n+1)/gamma, the lower end of the certified exponent range
/// for pinching ratio gamma >= 1.
double p_gamma(int n, double gamma);

/// The certificate polynomial
/// P_{sigma,tau}(t) = t^2 - (n+1+(n-1)sigma - (tau-2)^2) t + (n-1) tau^2 (1-sigma),
/// sigma in (0,1].
double cert_poly(int n, double sigma, double tau, double t);

struct ImprovedBound {
  double value = 0.0;     // sup over admissible tau of the right root
  double tau_star = 0.0;  // maximizer
};

/// Lower bound on the first nonzero even eigenvalue from the pinching ratio
/// sigma = alpha/beta: the supremum of right roots R_{sigma,tau} over
/// tau in [1/2, 6], restricted to tau with P_{sigma,tau}(n-1) < 0.
/// Always >= n-1 + sigma(n+1) because tau = sigma+1 qualifies.
ImprovedBound improved_lower_bound(int n, double sigma);

enum class CertStatus { by_pinching, by_spectrum, not_certified };

/// Uniqueness certificate for the even L^p-Minkowski problem of one body at
/// one exponent. Numerical and non-rigorous: pinching constants and
/// eigenvalues come from grid sampling.
struct Certificate {
  std::string body_id;
  int dim = 0;
  double p = 0.0;

  double gamma = 0.0;
  double p_gamma_value = 0.0;
  bool pinching_pass = false;

  double lambda1_even = 0.0;
  double spectral_margin = 0.0;  // lambda_1e - (n - p)
  bool spectral_pass = false;
  bool spectral_converged = false;

  CertStatus status = CertStatus::not_certified;
  double margin_tol = 1e-3;
  bool non_rigorous = true;
};

struct CertifyOptions {
  double margin_tol = 1e-3;  // required spectral margin above n - p
};

/// Combine the pinching route (p >= p_gamma) and the direct spectral route
/// (lambda_1e > n - p with margin) into a verdict. p must lie in [-n, 1);
/// the boundary p = -n is accepted as input but can never certify.
Certificate certify(const std::string& body_id, int dim, const PinchingReport& pinch,
                    const SpectralResult& spec, double p, const CertifyOptions& opt = {});

const char* to_string(CertStatus s);

struct MinkowskiGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // lhs - rhs; nonnegative when the inequality holds
};

/// Both sides of the even L^p-Minkowski inequality for bodies on a shared
/// grid; p = 0 evaluates the log-Minkowski (limiting) form. p in (-n, 1].
MinkowskiGap minkowski_inequality(const SupportField& K, const SupportField& L, double p);

}  // namespace hbm
