#include <doctest.h>

#include <cmath>
#include <vector>

#include "crossdiff/errors.hpp"
#include "crossdiff/limit_solver.hpp"
#include "crossdiff/manifold.hpp"

using namespace crossdiff;

namespace {

constexpr double kPi = 3.14159265358979323846;

LimitState homogeneous(double u, double v, int n = 4) {
  Grid g{1.0, n};
  LimitState s;
  s.u = Field(g, Array::Constant(n, u));
  s.v = Field(g, Array::Constant(n, v));
  return s;
}

LimitState bump_state(const Grid& g, double au, double av) {
  LimitState s;
  s.u = Field(g);
  s.v = Field(g);
  const Array x = g.centers();
  for (int i = 0; i < g.cells; ++i) {
    s.u.values[i] = 0.2 + au * (1.0 + std::cos(kPi * x[i]));
    s.v.values[i] = 0.2 + av * (1.0 - std::cos(kPi * x[i]));
  }
  return s;
}

struct Ode2 {
  double u, v;
};

Ode2 ode_reference(Ode2 y, const ModelParams& p, double t_end, double dt_ref) {
  auto rhs = [&](const Ode2& s) {
    const ManifoldPoint pt = solve_manifold(s.u, s.v, p);
    const Reactions f = eval_reactions(pt.u_a_star, pt.u_b_star, s.v, p);
    return Ode2{f.f_u, f.f_v};
  };
  const long n = std::lround(t_end / dt_ref);
  for (long k = 0; k < n; ++k) {
    const Ode2 k1 = rhs(y);
    const Ode2 k2 = rhs({y.u + 0.5 * dt_ref * k1.u, y.v + 0.5 * dt_ref * k1.v});
    const Ode2 k3 = rhs({y.u + 0.5 * dt_ref * k2.u, y.v + 0.5 * dt_ref * k2.v});
    const Ode2 k4 = rhs({y.u + dt_ref * k3.u, y.v + dt_ref * k3.v});
    y.u += dt_ref / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
    y.v += dt_ref / 6.0 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  }
  return y;
}

}  // namespace

TEST_CASE("degenerate cross-diffusion reduces to linear diffusion") {
  ModelParams p;
  p.d_a = p.d_b = 1.4;
  Grid g{1.0, 16};
  LimitState s = bump_state(g, 0.3, 0.2);
  const double dt = 0.25 * limit_stable_dt(g, p, 1.0);
  const LimitState out = step_limit(s, dt, p);

  // manual: u + dt*(1.4 Lap u + f_u(ua*, ub*, v))
  Array lap;
  laplacian_neumann_into(s.u.values, g.dx(), lap);
  for (int i = 0; i < g.cells; ++i) {
    const ManifoldPoint pt = solve_manifold(s.u.values[i], s.v.values[i], p);
    const Reactions f = eval_reactions(pt.u_a_star, pt.u_b_star, s.v.values[i], p);
    const double expect = s.u.values[i] + dt * (1.4 * lap[i] + f.f_u);
    CHECK(out.u.values[i] == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("homogeneous run matches the manifold ODE reference") {
  ModelParams p;
  LimitState s = homogeneous(0.7, 0.5);
  SolverConfig cfg;
  cfg.dt = 2e-5;
  cfg.t_end = 0.1;
  cfg.monitor_every = 1000000;
  const LimitRunResult run = integrate_limit(s, cfg, p);
  const Ode2 ref = ode_reference({0.7, 0.5}, p, 0.1, cfg.dt / 100.0);
  CHECK(run.state.u.values[0] == doctest::Approx(ref.u).epsilon(1e-5));
  CHECK(run.state.v.values[0] == doctest::Approx(ref.v).epsilon(1e-5));
}

TEST_CASE("zero state is a fixed point") {
  ModelParams p;
  LimitState s = homogeneous(0.0, 0.0);
  const LimitState out = step_limit(s, 1e-5, p);
  CHECK(out.u.values.abs().maxCoeff() == 0.0);
  CHECK(out.v.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("v = 0 stays zero") {
  ModelParams p;
  LimitState s = homogeneous(0.6, 0.0, 8);
  SolverConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 0.02;
  const LimitRunResult run = integrate_limit(s, cfg, p);
  CHECK(run.state.v.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("stability bound violations name the required dt") {
  ModelParams p;
  Grid g{1.0, 64};
  LimitState s = bump_state(g, 0.2, 0.2);
  SolverConfig cfg;
  cfg.dt = 1.0;  // far above h^2/(2 d_b)
  cfg.t_end = 0.1;
  try {
    integrate_limit(s, cfg, p);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("stability") != std::string::npos);
    CHECK(msg.find("reduce dt") != std::string::npos);
  }
}

TEST_CASE("pure cross-diffusion is an L1 contraction on ordered data") {
  ModelParams p;
  p.eta_a = p.eta_b = 0.0;  // reaction-free dynamics (library level, unvalidated)
  p.eta_v1 = p.eta_v2 = 0.0;
  p.gamma_a = p.gamma_b = 0.0;
  Grid g{1.0, 32};
  LimitState lo = bump_state(g, 0.2, 0.15);
  LimitState hi = lo;
  hi.u.values += 0.1 + 0.05 * (2.0 * kPi * g.centers()).cos().abs();

  const double dt = 0.5 * limit_stable_dt(g, p, 1.0);
  double prev_l1 = norm_lp(Field(g, hi.u.values - lo.u.values), 1.0);
  for (int k = 0; k < 50; ++k) {
    lo = step_limit(lo, dt, p);
    hi = step_limit(hi, dt, p);
    CHECK((hi.u.values - lo.u.values >= -1e-13).all());  // order preserved
    const double l1 = norm_lp(Field(g, hi.u.values - lo.u.values), 1.0);
    CHECK(l1 <= prev_l1 + 1e-13);
    prev_l1 = l1;
  }
}

TEST_CASE("perturbation response is stable across perturbation sizes") {
  ModelParams p;
  Grid g{1.0, 32};
  SolverConfig cfg;
  cfg.dt = 0.9 * limit_stable_dt(g, p, 0.9);
  cfg.t_end = 0.05;
  cfg.monitor_every = 25;

  auto trace = [&](double delta0) {
    LimitState s = bump_state(g, 0.3, 0.25);
    LimitState sp = s;
    const Array pert = (kPi * g.centers()).sin();
    sp.u.values += delta0 * pert;
    std::vector<Array> du, dv;
    std::vector<double> times;
    LimitMonitorOptions opt1, opt2;
    std::vector<Array> u1, v1;
    opt1.observer = [&](const LimitState& st, const MonitorSample&) {
      u1.push_back(st.u.values);
      v1.push_back(st.v.values);
    };
    integrate_limit(s, cfg, p, opt1);
    size_t k = 0;
    double acc = 0.0, tprev = 0.0;
    opt2.observer = [&](const LimitState& st, const MonitorSample&) {
      const double d2 = g.dx() * ((st.u.values - u1[k]).square().sum() +
                                  (st.v.values - v1[k]).square().sum());
      if (k > 0) acc += d2 * (st.t - tprev);
      tprev = st.t;
      ++k;
    };
    integrate_limit(sp, cfg, p, opt2);
    const double pert_l2 = delta0 * norm_lp_array(pert, g.dx(), 2.0);
    return std::sqrt(acc) / pert_l2;
  };

  const double r3 = trace(1e-3);
  const double r4 = trace(1e-4);
  CHECK(r3 / r4 <= 3.0);
  CHECK(r4 / r3 <= 3.0);
}

TEST_CASE("mass bound flags stay clear on a plain run") {
  ModelParams p;
  Grid g{1.0, 32};
  LimitState s = bump_state(g, 0.3, 0.25);
  SolverConfig cfg;
  cfg.dt = 0.9 * limit_stable_dt(g, p, 0.9);
  cfg.t_end = 0.1;
  cfg.monitor_every = 100;
  const LimitRunResult run = integrate_limit(s, cfg, p);
  CHECK_FALSE(run.log.any_violation());
  CHECK(run.log.samples.back().grad_u_l2 >= 0.0);
  CHECK(run.state.u.values.isFinite().all());
  CHECK(run.state.v.values.isFinite().all());
}
