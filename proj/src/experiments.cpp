#include "crossdiff/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <thread>

#include "crossdiff/errors.hpp"
#include "crossdiff/fast_solver.hpp"
#include "crossdiff/limit_solver.hpp"
#include "crossdiff/manifold.hpp"

namespace crossdiff {

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y;
  for (const auto& [eps, err] : points) {
    if (!(err > 0.0)) {
      std::cerr << "fit_rate: excluding nonpositive error " << err << " at eps "
                << eps << "\n";
      continue;
    }
    x.push_back(std::log(eps));
    y.push_back(std::log(err));
  }
  const int n = static_cast<int>(x.size());
  if (n < 3)
    throw std::invalid_argument(
        "fit_rate: needs at least 3 positive points, got " + std::to_string(n));
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  RateFit f;
  f.n_points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

const RateFit& ConvergenceResult::fit(const std::string& name) const {
  for (const auto& [n, f] : fits)
    if (n == name) return f;
  throw std::invalid_argument("no fit column named " + name);
}

namespace {

// Trapezoid weights from sample times (samples sit at step boundaries).
std::vector<double> time_weights(const std::vector<double>& t) {
  const size_t n = t.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  for (size_t k = 0; k < n; ++k) {
    const double left = k == 0 ? t[0] : t[k - 1];
    const double right = k + 1 == n ? t[n - 1] : t[k + 1];
    w[k] = 0.5 * (right - left);
  }
  return w;
}

struct LimitTrace {
  std::vector<double> t;
  std::vector<Array> u, v, ub_star;
};

LimitTrace run_limit_reference(const Scenario& sc, const SolverConfig& cfg) {
  LimitTrace trace;
  Array cache;
  LimitMonitorOptions opt;
  opt.observer = [&](const LimitState& s, const MonitorSample&) {
    const int n = s.u.grid.cells;
    if (cache.size() == 0) cache = 0.5 * s.u.values;
    Array ub(n);
    for (int i = 0; i < n; ++i) {
      const ManifoldPoint pt =
          solve_manifold_warm(s.u.values[i], s.v.values[i], sc.params, cache[i]);
      cache[i] = pt.u_b_star;
      ub[i] = pt.u_b_star;
    }
    trace.t.push_back(s.t);
    trace.u.push_back(s.u.values);
    trace.v.push_back(s.v.values);
    trace.ub_star.push_back(std::move(ub));
  };
  integrate_limit(build_limit_initial(sc), cfg, sc.params, opt);
  return trace;
}

// The eps -> 0 member of the fast Strang family: diffusion half-steps and the
// midpoint (u, v) advance are shared code paths with step_fast; the stiff
// backward-Euler substep degenerates to the exact manifold projection.
struct ProjectedStepper {
  const ModelParams& p;
  Grid grid;
  Array ub_star;  // warm-start cache
  Array tmp;

  ProjectedStepper(const ModelParams& params, const Grid& g)
      : p(params), grid(g), ub_star(0.5 * Array::Ones(g.cells)) {}

  bool try_once(FastState& s, double dt) {
    const double h = grid.dx();
    solve_diffusion_be(s.u_a.values, p.d_a * 0.5 * dt, h, tmp);
    s.u_a.values.swap(tmp);
    solve_diffusion_be(s.u_b.values, p.d_b * 0.5 * dt, h, tmp);
    s.u_b.values.swap(tmp);
    solve_diffusion_be(s.v.values, p.d_v * 0.5 * dt, h, tmp);
    s.v.values.swap(tmp);
    for (int i = 0; i < grid.cells; ++i) {
      const UvAdvance uv = advance_uv_midpoint(s.u_a.values[i], s.u_b.values[i],
                                               s.v.values[i], dt, p);
      if (!uv.ok) return false;
      const ManifoldPoint pt = solve_manifold_warm(uv.u, uv.v, p, ub_star[i]);
      ub_star[i] = pt.u_b_star;
      s.u_b.values[i] = pt.u_b_star;
      s.u_a.values[i] = pt.u_a_star;
      s.v.values[i] = uv.v;
    }
    solve_diffusion_be(s.u_a.values, p.d_a * 0.5 * dt, h, tmp);
    s.u_a.values.swap(tmp);
    solve_diffusion_be(s.u_b.values, p.d_b * 0.5 * dt, h, tmp);
    s.u_b.values.swap(tmp);
    solve_diffusion_be(s.v.values, p.d_v * 0.5 * dt, h, tmp);
    s.v.values.swap(tmp);
    return true;
  }

  bool advance(FastState& s, double dt, int retries_left) {
    FastState trial = s;
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

LimitTrace run_projected_reference(const Scenario& sc, const SolverConfig& cfg) {
  const Grid grid = sc.grid;
  // limit initial data: totals from the family, u_b projected onto the manifold
  Scenario prepared = sc;
  prepared.initial.well_prepared = true;
  InitialFields f = build_initial_fields(prepared);
  FastState s;
  s.t = 0.0;
  s.eps = 1.0;  // unused by the projected stepper
  s.u_a = std::move(f.u_a);
  s.u_b = std::move(f.u_b);
  s.v = std::move(f.v);

  // identical step count and cadence as integrate_fast
  const double dt_req = std::min(cfg.dt, cfg.cfl_safety * grid.dx());
  const long n_steps =
      std::max(1L, std::lround(std::ceil(cfg.t_end / dt_req - 1e-9)));
  const double dt = cfg.t_end / static_cast<double>(n_steps);

  LimitTrace trace;
  Array cache = 0.5 * (s.u_a.values + s.u_b.values);
  auto sample = [&](const FastState& st) {
    const int n = grid.cells;
    Array u = st.u_a.values + st.u_b.values;
    Array ub(n);
    for (int i = 0; i < n; ++i) {
      const ManifoldPoint pt =
          solve_manifold_warm(u[i], st.v.values[i], sc.params, cache[i]);
      cache[i] = pt.u_b_star;
      ub[i] = pt.u_b_star;
    }
    trace.t.push_back(st.t);
    trace.u.push_back(std::move(u));
    trace.v.push_back(st.v.values);
    trace.ub_star.push_back(std::move(ub));
  };

  ProjectedStepper stepper(sc.params, grid);
  stepper.ub_star = s.u_b.values;
  sample(s);
  for (long k = 1; k <= n_steps; ++k) {
    if (!stepper.advance(s, dt, cfg.positivity_retry_limit))
      throw SolverError("projected reference: positivity failure, reduce dt");
    s.t = dt * static_cast<double>(k);
    if (k % cfg.monitor_every == 0 || k == n_steps) sample(s);
  }
  return trace;
}

struct ErrorAccumulator {
  const LimitTrace& ref;
  double h;
  size_t k = 0;

  ErrorAccumulator(const LimitTrace& trace, double dx) : ref(trace), h(dx) {}

  std::vector<double> t, u_l2, u_semi, v_l2, v_semi, w_h1sq, q_l2;

  void feed(const FastState& s, const MonitorSample& m) {
    if (k >= ref.t.size() || std::abs(s.t - ref.t[k]) > 1e-9)
      throw SolverError("convergence run: snapshot times diverged from reference");
    const Array U = s.u_a.values + s.u_b.values - ref.u[k];
    const Array V = s.v.values - ref.v[k];
    const Array W = s.u_b.values - ref.ub_star[k];
    t.push_back(s.t);
    u_l2.push_back(norm_lp_array(U, h, 2.0));
    u_semi.push_back(h1_seminorm_array(U, h));
    v_l2.push_back(norm_lp_array(V, h, 2.0));
    v_semi.push_back(h1_seminorm_array(V, h));
    const double wl2 = norm_lp_array(W, h, 2.0);
    const double wsemi = h1_seminorm_array(W, h);
    w_h1sq.push_back(wl2 * wl2 + wsemi * wsemi);
    q_l2.push_back(m.q_l2);
    ++k;
  }

  void fill_row(ConvergenceRow& row) const {
    const auto w = time_weights(t);
    double sup_u = 0, sup_v = 0, int_us = 0, int_vs = 0, int_w = 0, int_q = 0;
    for (size_t i = 0; i < t.size(); ++i) {
      sup_u = std::max(sup_u, u_l2[i]);
      sup_v = std::max(sup_v, v_l2[i]);
      int_us += w[i] * u_semi[i] * u_semi[i];
      int_vs += w[i] * v_semi[i] * v_semi[i];
      int_w += w[i] * w_h1sq[i];
      int_q += w[i] * q_l2[i] * q_l2[i];
    }
    row.err_u = sup_u + std::sqrt(int_us);
    row.err_v = sup_v + std::sqrt(int_vs);
    row.err_ub = std::sqrt(int_w);
    row.q_norm = std::sqrt(int_q);
  }
};

double initial_layer_norm(const FastState& s, const ModelParams& p) {
  const int n = s.u_a.grid.cells;
  Array w(n);
  for (int i = 0; i < n; ++i) {
    const ManifoldPoint pt = solve_manifold(
        s.u_a.values[i] + s.u_b.values[i], s.v.values[i], p);
    w[i] = s.u_b.values[i] - pt.u_b_star;
  }
  const double h = s.u_a.grid.dx();
  const double l2 = norm_lp_array(w, h, 2.0);
  const double semi = h1_seminorm_array(w, h);
  return std::sqrt(l2 * l2 + semi * semi);
}

// Shared dt for the fast/reference pair, snapped to tile [0, t_end]. The
// explicit limit solver additionally caps dt by its stability bound.
SolverConfig shared_config(const Scenario& sc, ConvergenceReference reference) {
  SolverConfig cfg = sc.solver;
  if (reference == ConvergenceReference::LimitSolver)
    cfg.dt = std::min(cfg.dt, limit_stable_dt(sc.grid, sc.params, cfg.cfl_safety));
  cfg.dt = std::min(cfg.dt, cfg.cfl_safety * sc.grid.dx());
  const long n = std::max(1L, std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
  cfg.dt = cfg.t_end / static_cast<double>(n);
  return cfg;
}

LimitTrace run_reference(const Scenario& sc, const SolverConfig& cfg,
                         ConvergenceReference reference) {
  return reference == ConvergenceReference::ProjectedScheme
             ? run_projected_reference(sc, cfg)
             : run_limit_reference(sc, cfg);
}

void parallel_over(size_t count, int jobs,
                   const std::function<void(size_t)>& body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (jobs == 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(count);
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (const std::exception& e) {
          errors[i] = e.what();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed) {
    for (size_t i = 0; i < count; ++i)
      if (!errors[i].empty()) throw SolverError(errors[i]);
  }
}

}  // namespace

ConvergenceResult run_convergence(const Scenario& scenario,
                                  std::vector<double> eps_list, bool prepared,
                                  int jobs, ConvergenceReference reference) {
  if (eps_list.size() < 3)
    throw std::invalid_argument("run_convergence: need at least 3 eps values");
  std::sort(eps_list.begin(), eps_list.end());
  for (double e : eps_list)
    if (!(e > 0.0))
      throw std::invalid_argument("run_convergence: eps values must be positive");
  if (std::log10(eps_list.back() / eps_list.front()) < 1.5 - 1e-9)
    throw std::invalid_argument(
        "run_convergence: eps list should span at least 1.5 decades");

  Scenario sc = scenario;
  if (prepared) sc.initial.well_prepared = true;
  const SolverConfig cfg = shared_config(sc, reference);

  const LimitTrace ref = run_reference(sc, cfg, reference);

  ConvergenceResult result;
  result.rows.resize(eps_list.size());
  result.dt_used = cfg.dt;

  std::atomic<long> steps{0};
  parallel_over(eps_list.size(), jobs, [&](size_t i) {
    const double eps = eps_list[i];
    try {
      FastState init = build_fast_initial(sc, eps);
      ConvergenceRow row;
      row.eps = eps;
      row.eps_init = initial_layer_norm(init, sc.params);
      ErrorAccumulator acc{ref, sc.grid.dx()};
      FastMonitorOptions opt;
      opt.with_energy = false;
      opt.observer = [&acc](const FastState& s, const MonitorSample& m) {
        acc.feed(s, m);
      };
      const FastRunResult run = integrate_fast(init, cfg, sc.params, opt);
      acc.fill_row(row);
      result.rows[i] = row;
      steps = run.steps;
    } catch (const std::exception& e) {
      throw SolverError("eps=" + std::to_string(eps) + ": " + e.what());
    }
  });
  result.steps = steps;

  auto column = [&](auto getter) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : result.rows) pts.emplace_back(r.eps, getter(r));
    return fit_rate(pts);
  };
  result.fits.emplace_back("err_u", column([](const ConvergenceRow& r) { return r.err_u; }));
  result.fits.emplace_back("err_v", column([](const ConvergenceRow& r) { return r.err_v; }));
  result.fits.emplace_back("err_ub", column([](const ConvergenceRow& r) { return r.err_ub; }));
  result.fits.emplace_back("q_norm", column([](const ConvergenceRow& r) { return r.q_norm; }));
  return result;
}

namespace {

// Perturbation direction for the layer studies: u_a* u_b* bump, H1-normalized.
// Vanishes where u does, so moderate eps_init targets stay inside [0, u].
Array layer_direction(const InitialFields& base, double h) {
  Array g = base.u_a.values * base.u_b.values;
  const double l2 = norm_lp_array(g, h, 2.0);
  const double semi = h1_seminorm_array(g, h);
  const double n = std::sqrt(l2 * l2 + semi * semi);
  if (!(n > 0.0))
    throw std::invalid_argument("initial layer: zero initial data, no direction");
  return g / n;
}

FastState perturbed_initial(const Scenario& sc, double eps, double eps_init) {
  Scenario prepared = sc;
  prepared.initial.well_prepared = true;
  InitialFields base = build_initial_fields(prepared);
  const Array dir = layer_direction(base, sc.grid.dx());
  Array ub = base.u_b.values + eps_init * dir;
  const Array u = base.u_a.values + base.u_b.values;
  if ((ub < 0.0).any() || (ub > u).any())
    throw std::invalid_argument(
        "initial layer: eps_init target " + std::to_string(eps_init) +
        " pushes u_b outside [0, u]; reduce it");
  FastState st;
  st.t = 0.0;
  st.eps = eps;
  st.u_b = Field(sc.grid, std::move(ub));
  st.u_a = Field(sc.grid, u - st.u_b.values);
  st.v = std::move(base.v);
  return st;
}

}  // namespace

LayerResult run_initial_layer(const Scenario& scenario, double eps,
                              const std::vector<double>& eps_init_list) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_initial_layer: eps must be > 0");
  Scenario sc = scenario;
  const SolverConfig cfg =
      shared_config(sc, ConvergenceReference::ProjectedScheme);
  Scenario prepared = sc;
  prepared.initial.well_prepared = true;
  const LimitTrace ref = run_projected_reference(prepared, cfg);

  LayerResult out;
  out.eps = eps;
  for (double target : eps_init_list) {
    FastState init = target == 0.0 ? build_fast_initial(prepared, eps)
                                   : perturbed_initial(sc, eps, target);
    LayerRow row;
    row.eps_init = initial_layer_norm(init, sc.params);
    ErrorAccumulator acc{ref, sc.grid.dx()};
    FastMonitorOptions opt;
    opt.with_energy = false;
    opt.observer = [&acc](const FastState& s, const MonitorSample& m) {
      acc.feed(s, m);
    };
    integrate_fast(init, cfg, sc.params, opt);
    ConvergenceRow tmp;
    acc.fill_row(tmp);
    row.err_u = tmp.err_u;
    row.err_ub = tmp.err_ub;
    out.rows.push_back(row);
  }
  return out;
}

LayerDecayResult run_layer_decay(const Scenario& scenario, double eps,
                                 double eps_init_target) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_layer_decay: eps must be > 0");
  Scenario sc = scenario;
  SolverConfig cfg = sc.solver;
  cfg.t_end = 12.0 * eps;
  cfg.dt = std::min(cfg.dt, eps / 50.0);
  cfg.monitor_every = 1;

  FastState init = perturbed_initial(sc, eps, eps_init_target);
  LayerDecayResult out;
  FastMonitorOptions opt;
  opt.with_energy = false;
  opt.observer = [&out](const FastState&, const MonitorSample& m) {
    out.t.push_back(m.t);
    out.dist.push_back(m.manifold_dist);
  };
  integrate_fast(init, cfg, sc.params, opt);

  // Fit log(dist) vs t over the first decade of decay (raw log, no floor
  // subtraction; the window stops before the quasi-static plateau matters).
  const double d0 = out.dist.empty() ? 0.0 : out.dist.front();
  if (!(d0 > 0.0))
    throw std::invalid_argument("run_layer_decay: initial manifold distance is 0");
  std::vector<double> tf, yf;
  for (size_t i = 0; i < out.t.size(); ++i) {
    if (out.dist[i] < 0.1 * d0) break;
    tf.push_back(out.t[i]);
    yf.push_back(std::log(out.dist[i]));
  }
  if (tf.size() < 3)
    throw SolverError("run_layer_decay: too few samples in the decay window");
  double mx = 0, my = 0;
  for (size_t i = 0; i < tf.size(); ++i) {
    mx += tf[i];
    my += yf[i];
  }
  mx /= tf.size();
  my /= tf.size();
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < tf.size(); ++i) {
    sxx += (tf[i] - mx) * (tf[i] - mx);
    sxy += (tf[i] - mx) * (yf[i] - my);
    syy += (yf[i] - my) * (yf[i] - my);
  }
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) throw SolverError("run_layer_decay: distance did not decay");
  out.tau_fit = -1.0 / slope;
  double ss_res = 0;
  const double b0 = my - slope * mx;
  for (size_t i = 0; i < tf.size(); ++i) {
    const double r = yf[i] - (b0 + slope * tf[i]);
    ss_res += r * r;
  }
  out.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  out.n_fit = static_cast<int>(tf.size());
  return out;
}

UniformityResult run_energy_uniformity(const Scenario& scenario,
                                       std::vector<double> eps_list,
                                       const std::vector<double>& p_list,
                                       int jobs) {
  if (eps_list.empty() || p_list.empty())
    throw std::invalid_argument("run_energy_uniformity: empty eps or p list");
  std::sort(eps_list.begin(), eps_list.end());
  for (double pv : p_list) {
    const ExponentTable t = exponents(pv, scenario.params);
    if (!t.in_basic_range && !t.in_bootstrap_range)
      throw std::invalid_argument(
          "run_energy_uniformity: p=" + std::to_string(pv) +
          " outside the admissible energy-estimate range");
  }

  Scenario sc = scenario;
  const size_t ne = eps_list.size(), np = p_list.size();
  std::vector<UniformityRow> rows(ne * np);

  parallel_over(ne, jobs, [&](size_t ei) {
    const double eps = eps_list[ei];
    try {
      std::vector<double> qp(np), rp(np);
      for (size_t pi = 0; pi < np; ++pi) {
        const ExponentTable t = exponents(p_list[pi], sc.params);
        qp[pi] = t.q_p;
        rp[pi] = t.r_p;
      }
      std::vector<UniformityRow> local(np);
      for (size_t pi = 0; pi < np; ++pi)
        local[pi] = {eps, p_list[pi], 0.0, 0.0, 0.0};
      FastMonitorOptions opt;
      opt.energy_p.assign(p_list.begin(), p_list.end());
      opt.observer = [&](const FastState& s, const MonitorSample& m) {
        for (size_t pi = 0; pi < np; ++pi) {
          local[pi].sup_Ep = std::max(local[pi].sup_Ep, m.energies[pi]);
          local[pi].sup_ua_qp =
              std::max(local[pi].sup_ua_qp, norm_lp(s.u_a, qp[pi]));
          local[pi].sup_ub_rp =
              std::max(local[pi].sup_ub_rp, norm_lp(s.u_b, rp[pi]));
        }
      };
      integrate_fast(build_fast_initial(sc, eps), sc.solver, sc.params, opt);
      for (size_t pi = 0; pi < np; ++pi) rows[ei * np + pi] = local[pi];
    } catch (const std::exception& e) {
      throw SolverError("eps=" + std::to_string(eps) + ": " + e.what());
    }
  });

  UniformityResult out;
  out.rows = std::move(rows);
  for (size_t pi = 0; pi < np; ++pi) {
    auto ratio = [&](auto getter) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (size_t ei = 0; ei < ne; ++ei) {
        const double v = getter(out.rows[ei * np + pi]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi == 0.0) return 1.0;  // all-zero column (zero initial data)
      return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    };
    out.ratios.push_back(
        {p_list[pi],
         ratio([](const UniformityRow& r) { return r.sup_Ep; }),
         ratio([](const UniformityRow& r) { return r.sup_ua_qp; }),
         ratio([](const UniformityRow& r) { return r.sup_ub_rp; })});
  }
  return out;
}

}  // namespace crossdiff
