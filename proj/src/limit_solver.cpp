#include "crossdiff/limit_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crossdiff/errors.hpp"
#include "crossdiff/manifold.hpp"

namespace crossdiff {

double limit_stable_dt(const Grid& g, const ModelParams& p, double cfl_safety) {
  const double h = g.dx();
  return cfl_safety * h * h / (2.0 * p.d_b);
}

namespace {

struct LimitStepper {
  const ModelParams& p;
  Grid grid;
  double manifold_tol;
  Array ub_star;  // warm-start cache, previous step's roots
  Array flux, lap, fu, fv, rhs, tmp;

  LimitStepper(const ModelParams& params, const Grid& g, double tol)
      : p(params), grid(g), manifold_tol(tol) {
    ub_star = Array::Zero(g.cells);
    flux.resize(g.cells);
    fu.resize(g.cells);
    fv.resize(g.cells);
  }

  void seed_cache(const LimitState& s) { ub_star = 0.5 * s.u.values; }

  // One explicit-u / implicit-v step; false on positivity failure.
  bool try_once(LimitState& s, double dt) {
    const int n = grid.cells;
    const double h = grid.dx();
    const double delta = p.d_b - p.d_a;
    for (int i = 0; i < n; ++i) {
      const double u = s.u.values[i];
      const double v = s.v.values[i];
      const ManifoldPoint pt =
          solve_manifold_warm(u, v, p, ub_star[i], manifold_tol);
      ub_star[i] = pt.u_b_star;
      flux[i] = p.d_a * u + delta * pt.u_b_star;
      const Reactions r = eval_reactions(pt.u_a_star, pt.u_b_star, v, p);
      fu[i] = r.f_u;
      fv[i] = r.f_v;
    }
    laplacian_neumann_into(flux, h, lap);
    rhs = s.u.values + dt * (lap + fu);
    if ((rhs < 0.0).any()) return false;
    Array u_new = rhs;
    rhs = s.v.values + dt * fv;
    if ((rhs < 0.0).any()) return false;
    solve_diffusion_be(rhs, p.d_v * dt, h, tmp);
    s.u.values.swap(u_new);
    s.v.values.swap(tmp);
    s.t += dt;
    return true;
  }

  bool advance(LimitState& s, double dt, int retries_left) {
    LimitState trial = s;
    const Array cache_backup = ub_star;
    if (try_once(trial, dt)) {
      s = std::move(trial);
      return true;
    }
    ub_star = cache_backup;
    if (retries_left <= 0) return false;
    return advance(s, 0.5 * dt, retries_left - 1) &&
           advance(s, 0.5 * dt, retries_left - 1);
  }
};

void require_stable(double dt, const Grid& g, const ModelParams& p,
                    double cfl_safety) {
  const double bound = limit_stable_dt(g, p, cfl_safety);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "limit solver: dt " << dt << " exceeds the explicit stability bound "
       << bound << " = cfl_safety*h^2/(2 d_b); reduce dt to at most " << bound;
    throw SolverError(os.str());
  }
}

}  // namespace

LimitState step_limit(const LimitState& s, double dt, const ModelParams& p,
                      int retry_limit, double cfl_safety) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_limit: dt must be > 0");
  require_stable(dt, s.u.grid, p, cfl_safety);
  LimitStepper stepper(p, s.u.grid, kManifoldTol);
  stepper.seed_cache(s);
  LimitState out = s;
  if (!stepper.advance(out, dt, retry_limit))
    throw SolverError("limit solver: positivity failure, reduce dt");
  return out;
}

LimitRunResult integrate_limit(const LimitState& init, const SolverConfig& cfg,
                               const ModelParams& p,
                               const LimitMonitorOptions& opt) {
  check_config(cfg);
  check_field(init.u);
  check_field(init.v);

  const Grid grid = init.u.grid;
  require_stable(cfg.dt, grid, p, cfg.cfl_safety);
  const long n_steps = std::max(1L, std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  const double dt = cfg.t_end / static_cast<double>(n_steps);

  const double mass0 = norm_lp(init.u, 1.0);
  const double k1_bound =
      std::max(mass0, 2.0 * grid.measure() * p.eta_bar() / p.eta_low());
  const double rv = p.r_v();
  const double kinf_bound =
      std::max(norm_lp(init.v, std::numeric_limits<double>::infinity()),
               rv > 0.0 ? p.eta_v() / rv
                        : std::numeric_limits<double>::infinity());

  LimitRunResult res;
  res.state = init;
  res.state.t = 0.0;
  res.dt_effective = dt;

  auto sample = [&](const LimitState& s) {
    MonitorSample m;
    m.t = s.t;
    m.mass_l1 = norm_lp(s.u, 1.0);
    m.v_linf = norm_lp(s.v, std::numeric_limits<double>::infinity());
    m.grad_u_l2 = h1_seminorm(s.u);
    m.mass_bound_violated = m.mass_l1 > 1.05 * k1_bound;
    m.v_bound_violated = m.v_linf > 1.05 * kinf_bound;
    res.log.samples.push_back(m);
    if (opt.observer) opt.observer(s, m);
  };

  LimitStepper stepper(p, grid, opt.manifold_tol);
  stepper.seed_cache(res.state);
  sample(res.state);
  for (long k = 1; k <= n_steps; ++k) {
    if (!stepper.advance(res.state, dt, cfg.positivity_retry_limit))
      throw SolverError("limit solver: positivity failure, reduce dt");
    res.state.t = dt * static_cast<double>(k);
    if (k % cfg.monitor_every == 0 || k == n_steps) sample(res.state);
  }
  res.steps = n_steps;
  return res;
}

}  // namespace crossdiff
