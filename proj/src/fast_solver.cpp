#include "crossdiff/fast_solver.hpp"

#include <cmath>
#include <limits>

#include "crossdiff/energy.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/manifold.hpp"

namespace crossdiff {

void check_config(const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("solver dt must be > 0");
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("solver t_end must be > 0");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw std::invalid_argument("cfl_safety must be in (0, 1]");
  if (cfg.monitor_every < 1)
    throw std::invalid_argument("monitor_every must be >= 1");
  if (cfg.positivity_retry_limit < 0)
    throw std::invalid_argument("positivity_retry_limit must be >= 0");
}

UvAdvance advance_uv_midpoint(double u_a, double u_b, double v, double dt,
                              const ModelParams& p) {
  const double u = u_a + u_b;
  const Reactions k1 = eval_reactions(u_a, u_b, v, p);
  const double um = u + 0.5 * dt * k1.f_u;
  const double vm = v + 0.5 * dt * k1.f_v;
  if (!(um - u_b >= 0.0) || !(vm >= 0.0)) return {false, u, v};
  const Reactions k2 = eval_reactions(um - u_b, u_b, vm, p);
  const double u1 = u + dt * k2.f_u;
  const double v1 = v + dt * k2.f_v;
  if (!(u1 >= 0.0) || !(v1 >= 0.0)) return {false, u, v};
  return {true, u1, v1};
}

UbSolve solve_ub_backward_euler(double u_new, double v_new, double u_b_old,
                                double dt, double eps, const ModelParams& p) {
  if (u_new == 0.0) return {true, 0.0};
  const double r = dt / eps;

  auto g = [&](double x) {
    const double ua = u_new - x;
    const Reactions f = eval_reactions(ua, x, v_new, p);
    const QEval q = eval_Q(ua, x, v_new, p);
    return x - u_b_old - dt * f.f_b + r * q.Q;
  };
  auto gprime = [&](double x) {
    const double fb_x = p.eta_b * (1.0 - 2.0 * p.b * x - p.d * v_new) -
                        p.gamma_b * u_new + 2.0 * p.gamma_b * x;
    return 1.0 - dt * fb_x + r * d2_Qtilde(u_new, x, v_new, p);
  };

  double lo = 0.0, hi = u_new;
  double glo = g(lo);
  double ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) return {false, u_b_old};  // root left [0, u]

  double x = std::min(std::max(u_b_old, lo), hi);
  double gx = g(x);
  const double gscale =
      1.0 + std::abs(u_b_old) +
      r * eval_Q(u_new, 0.0, v_new, p).lambda * std::max(u_new, 1.0);
  const double atol = 1e-14 * gscale;

  for (int it = 0; it < 100; ++it) {
    if (std::abs(gx) <= atol) return {true, x};
    if (gx > 0.0)
      hi = x;
    else
      lo = x;
    const double dg = gprime(x);
    double xn = (dg > 0.0) ? x - gx / dg : std::numeric_limits<double>::quiet_NaN();
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) return {true, x};
    x = xn;
    gx = g(x);
  }
  throw SolverError("fast reaction solve: Newton+bisection failed to converge");
}

namespace {

void diffusion_half(FastState& s, double half_dt, const ModelParams& p) {
  const double h = s.u_a.grid.dx();
  thread_local Array tmp;
  solve_diffusion_be(s.u_a.values, p.d_a * half_dt, h, tmp);
  s.u_a.values.swap(tmp);
  solve_diffusion_be(s.u_b.values, p.d_b * half_dt, h, tmp);
  s.u_b.values.swap(tmp);
  solve_diffusion_be(s.v.values, p.d_v * half_dt, h, tmp);
  s.v.values.swap(tmp);
}

bool reaction_full(FastState& s, double dt, const ModelParams& p) {
  const int n = s.u_a.grid.cells;
  for (int i = 0; i < n; ++i) {
    const double ua = s.u_a.values[i];
    const double ub = s.u_b.values[i];
    const double vv = s.v.values[i];
    const UvAdvance uv = advance_uv_midpoint(ua, ub, vv, dt, p);
    if (!uv.ok) return false;
    const UbSolve ubs = solve_ub_backward_euler(uv.u, uv.v, ub, dt, s.eps, p);
    if (!ubs.ok) return false;
    s.u_b.values[i] = ubs.u_b;
    s.u_a.values[i] = uv.u - ubs.u_b;
    s.v.values[i] = uv.v;
  }
  return true;
}

bool try_step(FastState& s, double dt, const ModelParams& p, int retries_left) {
  FastState trial = s;
  diffusion_half(trial, 0.5 * dt, p);
  if (!reaction_full(trial, dt, p)) {
    if (retries_left <= 0) return false;
    return try_step(s, 0.5 * dt, p, retries_left - 1) &&
           try_step(s, 0.5 * dt, p, retries_left - 1);
  }
  diffusion_half(trial, 0.5 * dt, p);
  trial.t = s.t + dt;
  s = std::move(trial);
  return true;
}

}  // namespace

FastState step_fast(const FastState& s, double dt, const ModelParams& p,
                    int retry_limit) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_fast: dt must be > 0");
  if (!(s.eps > 0.0)) throw std::invalid_argument("step_fast: eps must be > 0");
  FastState out = s;
  if (!try_step(out, dt, p, retry_limit))
    throw SolverError("fast solver: positivity failure, reduce dt");
  return out;
}

FastRunResult integrate_fast(const FastState& init, const SolverConfig& cfg,
                             const ModelParams& p, const FastMonitorOptions& opt) {
  check_config(cfg);
  check_field(init.u_a);
  check_field(init.u_b);
  check_field(init.v);
  if (!(init.eps > 0.0)) throw std::invalid_argument("eps must be > 0");

  const Grid grid = init.u_a.grid;
  const double dt_req = std::min(cfg.dt, cfg.cfl_safety * grid.dx());
  const long n_steps = std::max(1L, std::lround(std::ceil(cfg.t_end / dt_req - 1e-9)));
  const double dt = cfg.t_end / static_cast<double>(n_steps);

  const double mass0 = norm_lp(init.u_a, 1.0) + norm_lp(init.u_b, 1.0);
  const double k1_bound =
      std::max(mass0, 2.0 * grid.measure() * p.eta_bar() / p.eta_low());
  const double rv = p.r_v();
  const double kinf_bound =
      std::max(norm_lp(init.v, std::numeric_limits<double>::infinity()),
               rv > 0.0 ? p.eta_v() / rv
                        : std::numeric_limits<double>::infinity());

  FastRunResult res;
  res.state = init;
  res.state.t = 0.0;
  res.dt_effective = dt;
  res.log.energy_p = opt.with_energy ? opt.energy_p : std::vector<double>{};

  Array ub_star_cache = 0.5 * (init.u_a.values + init.u_b.values);

  auto sample = [&](const FastState& s) {
    MonitorSample m;
    m.t = s.t;
    m.mass_l1 = norm_lp(s.u_a, 1.0) + norm_lp(s.u_b, 1.0);
    m.v_linf = norm_lp(s.v, std::numeric_limits<double>::infinity());
    const int n = grid.cells;
    double q2 = 0.0, md2 = 0.0, diss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ua = s.u_a.values[i], ub = s.u_b.values[i], vv = s.v.values[i];
      const QEval e = eval_Q(ua, ub, vv, p);
      q2 += e.Q * e.Q;
      diss -= e.lambda * e.Q * e.Q;
      const ManifoldPoint pt =
          solve_manifold_warm(ua + ub, vv, p, ub_star_cache[i], opt.manifold_tol);
      ub_star_cache[i] = pt.u_b_star;
      const double w = ub - pt.u_b_star;
      md2 += w * w;
    }
    m.q_l2 = std::sqrt(grid.dx() * q2);
    m.manifold_dist = std::sqrt(grid.dx() * md2);
    m.i2_fast = grid.dx() * diss / s.eps;
    m.grad_u_l2 = h1_seminorm_array(s.u_a.values + s.u_b.values, grid.dx());
    if (opt.with_energy)
      for (double pv : opt.energy_p) m.energies.push_back(energy_Ep(s, pv, p));
    m.mass_bound_violated = m.mass_l1 > 1.05 * k1_bound;
    m.v_bound_violated = m.v_linf > 1.05 * kinf_bound;
    res.log.samples.push_back(m);
    if (opt.observer) opt.observer(s, m);
  };

  sample(res.state);
  for (long k = 1; k <= n_steps; ++k) {
    res.state = step_fast(res.state, dt, p, cfg.positivity_retry_limit);
    res.state.t = dt * static_cast<double>(k);  // uniform grid, avoids drift
    if (k % cfg.monitor_every == 0 || k == n_steps) sample(res.state);
  }
  res.steps = n_steps;
  return res;
}

}  // namespace crossdiff
