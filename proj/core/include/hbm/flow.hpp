#pragma once

#include <string>
#include <vector>

#include "hbm/body.hpp"
#include "hbm/certify.hpp"

namespace hbm {

/// State of the volume-normalized anisotropic power-of-Gauss-curvature flow
/// in support-function form: dh/dt = -(rho_K kappa_L)^alpha followed by a
/// rescale to the initial volume. alpha = 1/(1-p).
struct FlowState {
  GridPtr grid;
  Eigen::VectorXd h;    // current support values of L_t
  Eigen::VectorXd rho;  // fixed anisotropy density dS_pK / dm
  double p = 0.0;
  double alpha = 1.0;
  double time = 0.0;
  long steps = 0;
  double volume0 = 0.0;
  double rel_change = 1.0;  // last |dh| / (dt max|h|)
  double residual = 1.0;    // last self-similarity residual
  double c_opt = 1.0;
};

struct FlowOptions {
  double cfl = 0.4;
  double conv_rel_change = 1e-8;  // convergence: relative change per unit time
  long max_steps = 400000;
  int max_retries = 30;           // dt halvings on convexity loss
  int series_stride = 25;         // record every k-th step
};

struct FlowSeriesRow {
  double time;
  double volume;
  double residual;
  double rel_change;
};

struct FlowRun {
  FlowState state;
  bool converged = false;
  std::string note;
  std::vector<FlowSeriesRow> series;
  Eigen::VectorXd h_initial;
};

FlowState init_flow(const SupportField& K, const SupportField& L0, double p);

/// One accepted explicit step; dt adapts to a CFL-like bound from the maximal
/// curvature speed and is halved on convexity loss. Returns false when the
/// retry budget is exhausted.
bool flow_step(FlowState& state, double& dt, const FlowOptions& opt = {});

/// Run until the relative change per unit time drops below tolerance.
FlowRun run_flow(const SupportField& K, const SupportField& L0, double p,
                 const FlowOptions& opt = {});

struct SelfSimilarity {
  double c_opt = 1.0;    // best proportionality S_p L ~ c S_p K in L^2(m)
  double residual = 0.0;  // relative L^2 distance at c_opt
};

SelfSimilarity selfsim_residual(const SupportField& L, const SupportField& K, double p);
SelfSimilarity selfsim_residual(const Eigen::VectorXd& density_L, const Eigen::VectorXd& density_K,
                                const SphereGrid& grid);

struct UniquenessRun {
  std::string initial_name;
  bool converged = false;
  long steps = 0;
  double residual = 0.0;
  double c_opt = 0.0;
  Eigen::VectorXd h_limit;  // normalized to unit volume
  std::vector<FlowSeriesRow> series;
};

struct UniquenessReport {
  double p = 0.0;
  bool refused = false;  // p at the critical exponent -n: no verdict possible
  std::string note;
  std::vector<UniquenessRun> runs;
  double max_pairwise_sup = 0.0;  // over converged runs, unit-volume normalized
  bool unique_within_tol = false;
  double uniqueness_tol = 5e-4;
  Certificate certificate;  // for the target body at this p
  bool certificate_consistent = false;
};

struct UniquenessOptions {
  FlowOptions flow;
  double uniqueness_tol = 5e-4;
  int spectral_degree = 12;
  CertifyOptions certify;
};

/// Run the flow towards S_p L = c S_p K from several even initial bodies and
/// compare the limits; reports whether the certificate verdict is consistent
/// with the observed uniqueness. p = -n is refused (critical exponent).
UniquenessReport uniqueness_experiment(const BodySpec& K, double p,
                                       const std::vector<BodySpec>& initials, long budget,
                                       const GridPtr& grid, const UniquenessOptions& opt = {});

}  // namespace hbm
