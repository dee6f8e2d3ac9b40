/* Experiment harness: eps-sweeps of the fast system against a same-grid,
 * same-dt limit reference, error norms
 *
 *   |g|_X = sup_t |g|_L2 + (int_0^T |g|_{H1-semi}^2 dt)^{1/2}
 *   |g|_Y = (int_0^T |g|_{H1}^2 dt)^{1/2}
 *
 * evaluated over monitor snapshots, log-log rate fits, the initial-layer
 * study and the eps-uniformity table of the energy norms. */
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crossdiff/scenario.hpp"

namespace crossdiff {

struct ConvergenceRow {
  double eps;
  double err_u;     // |u^eps - u|_X
  double err_v;     // |v^eps - v|_X
  double err_ub;    // |u_b^eps - u_b*(u, v)|_Y
  double q_norm;    // |Q|_L2((0,T)xOmega)
  double eps_init;  // |u_b^init - u_b*(u^init, v^init)|_H1
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural-log intercept
  double r_squared = 0.0;
  int n_points = 0;
};

/// Ordinary least squares on (log eps, log err). Nonpositive errors are
/// excluded with a warning on stderr; fewer than 3 surviving points is an
/// error.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;  // sorted by eps ascending
  std::vector<std::pair<std::string, RateFit>> fits;  // per error column
  double dt_used = 0.0;
  long steps = 0;

  const RateFit& fit(const std::string& name) const;
};

/// Reference trajectory for the eps-sweep errors.
///
/// ProjectedScheme integrates the limit system with the eps -> 0 member of
/// the fast solver's own splitting family (the stiff substep becomes an exact
/// manifold projection). Fast run and reference then share every
/// discretization term, so their difference isolates the eps-dependence; with
/// the independently discretized limit solver the O(dt) scheme difference
/// floors the small-eps errors instead.
enum class ConvergenceReference { ProjectedScheme, LimitSolver };

/// Runs the limit reference once and the fast system per eps on the identical
/// grid/dt, then fits every error column against eps. prepared=true projects
/// the initial u_b onto the slow manifold (eps_init = 0).
ConvergenceResult run_convergence(
    const Scenario& scenario, std::vector<double> eps_list, bool prepared,
    int jobs = 1,
    ConvergenceReference reference = ConvergenceReference::ProjectedScheme);

struct LayerRow {
  double eps_init;
  double err_u;
  double err_ub;
};

struct LayerResult {
  double eps;
  std::vector<LayerRow> rows;
};

/// Fixed eps; initial u_b offset along a fixed H1-normalized direction scaled
/// to the requested eps_init values.
LayerResult run_initial_layer(const Scenario& scenario, double eps,
                              const std::vector<double>& eps_init_list);

struct LayerDecayResult {
  std::vector<double> t;
  std::vector<double> dist;  // |u_b - u_b*(u^eps, v^eps)|_L2 per sample
  double tau_fit = 0.0;      // fitted time constant of exp(-t/tau)
  double r_squared = 0.0;
  int n_fit = 0;             // samples used by the fit
};

/// Short run resolving the O(eps) relaxation layer; fits log(dist) vs t over
/// the first decade of decay.
LayerDecayResult run_layer_decay(const Scenario& scenario, double eps,
                                 double eps_init_target);

struct UniformityRow {
  double eps;
  double p;
  double sup_Ep;
  double sup_ua_qp;  // sup_t |u_a|_{q(p)}
  double sup_ub_rp;  // sup_t |u_b|_{r(p)}
};

struct UniformityRatios {
  double p;
  double ratio_Ep;
  double ratio_ua;
  double ratio_ub;  // max/min across eps; 1 for degenerate columns
};

struct UniformityResult {
  std::vector<UniformityRow> rows;
  std::vector<UniformityRatios> ratios;
};

UniformityResult run_energy_uniformity(const Scenario& scenario,
                                       std::vector<double> eps_list,
                                       const std::vector<double>& p_list,
                                       int jobs = 1);

}  // namespace crossdiff
