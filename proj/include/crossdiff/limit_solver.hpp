/* Time integration of the cross-diffusion limit system
 *
 *   du/dt = Lap A(u, v) + f_u(u_a*, u_b*, v)
 *   dv/dt = d_v Lap v   + f_v(u_a*, u_b*, v)
 *
 * with (u_a*, u_b*) the slow-manifold split per cell. The u-step is explicit
 * (flux A differenced in divergence form, which keeps the zero-flux
 * conservation exact), so dt must satisfy dt <= cfl_safety * h^2 / (2 d_b);
 * the v-diffusion is backward Euler. Manifold roots are warm-started from the
 * previous step per cell. */
#pragma once

#include <functional>

#include "crossdiff/model.hpp"
#include "crossdiff/state.hpp"

namespace crossdiff {

/// Explicit stability bound for the u-step: cfl_safety * h^2 / (2 d_b).
double limit_stable_dt(const Grid& g, const ModelParams& p, double cfl_safety);

/// One step without warm-start state (cold manifold solves). Checks the
/// stability bound and retries with dt/2 on positivity failure.
LimitState step_limit(const LimitState& s, double dt, const ModelParams& p,
                      int retry_limit = 8, double cfl_safety = 1.0);

struct LimitMonitorOptions {
  double manifold_tol = 1e-12;
  std::function<void(const LimitState&, const MonitorSample&)> observer;
};

struct LimitRunResult {
  LimitState state;
  MonitorLog log;
  double dt_effective = 0.0;
  long steps = 0;
};

/// Integrates to cfg.t_end. Throws SolverError naming the required dt when
/// cfg.dt violates the stability bound. Monitors |u|_L1, |v|_inf and
/// |grad u|_L2 with the same 5%-slack bound flags as the fast solver.
LimitRunResult integrate_limit(const LimitState& init, const SolverConfig& cfg,
                               const ModelParams& p,
                               const LimitMonitorOptions& opt = {});

}  // namespace crossdiff
