/* Solver state containers and the shared monitor-log record. */
#pragma once

#include <vector>

#include "crossdiff/grid.hpp"

namespace crossdiff {

/// State of the fast reaction-diffusion system at one time.
struct FastState {
  double t = 0.0;
  double eps = 1.0;  // stiffness parameter, > 0
  Field u_a;
  Field u_b;
  Field v;
};

/// State of the cross-diffusion limit system at one time.
struct LimitState {
  double t = 0.0;
  Field u;
  Field v;
};

struct SolverConfig {
  double dt = 1e-5;          // base time step, > 0
  double cfl_safety = 0.9;   // in (0, 1]
  double t_end = 0.25;       // > 0
  int monitor_every = 100;   // steps between diagnostics
  int positivity_retry_limit = 8;
};

void check_config(const SolverConfig& cfg);

/// One row of scalar diagnostics. Fields that a solver does not produce stay 0.
struct MonitorSample {
  double t = 0.0;
  double mass_l1 = 0.0;        // |u_a + u_b|_L1 (fast) or |u|_L1 (limit)
  double v_linf = 0.0;
  double q_l2 = 0.0;           // |Q|_L2(Omega)
  double manifold_dist = 0.0;  // |u_b - u_b*(u, v)|_L2
  double i2_fast = 0.0;        // -(1/eps) int Lambda Q^2 <= 0
  double grad_u_l2 = 0.0;      // |grad u|_L2 (limit diagnostics)
  std::vector<double> energies;  // E_p for the requested p list
  bool mass_bound_violated = false;
  bool v_bound_violated = false;
};

struct MonitorLog {
  std::vector<double> energy_p;  // p values the `energies` columns refer to
  std::vector<MonitorSample> samples;

  bool any_violation() const {
    for (const auto& s : samples)
      if (s.mass_bound_violated || s.v_bound_violated) return true;
    return false;
  }
};

}  // namespace crossdiff
