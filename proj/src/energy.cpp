#include "crossdiff/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace crossdiff {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 15;
constexpr double kNodes[kGL] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kWeights[kGL] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671720,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671720, 0.0703660474881081, 0.0307532419961173};

double gl15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kGL; ++i) s += kWeights[i] * f(mid + half * kNodes[i]);
  return half * s;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double abs_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  const double err = std::abs(left + right - whole);
  if (err <= abs_tol || depth >= 48) {
    if (depth >= 48 && err > 64.0 * abs_tol)
      throw std::runtime_error("adaptive quadrature did not converge");
    return left + right;
  }
  return adapt(f, a, mid, left, 0.5 * abs_tol, depth + 1) +
         adapt(f, mid, b, right, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double adaptive_gauss_legendre(const std::function<double(double)>& f, double a,
                               double b, double rel_tol) {
  if (a == b) return 0.0;
  const double coarse = gl15(f, a, b);
  const double scale = std::max(std::abs(coarse), 1e-300);
  return adapt(f, a, b, coarse, rel_tol * scale, 0);
}

double energy_density(double u_a, double u_b, double v, double p_val,
                      const ModelParams& p, double rel_tol) {
  if (!(u_a >= 0.0) || !(u_b >= 0.0) || !(v >= 0.0))
    throw std::domain_error("energy_density: arguments must be nonnegative");
  if (!(p_val >= 1.0)) throw std::domain_error("energy_density: p must be >= 1");
  const double ea = p.alpha * (p_val - 1.0);
  const double eb = p.beta * (p_val - 1.0);
  double h = 0.0;
  if (u_a > 0.0) {
    h += adaptive_gauss_legendre(
        [&](double z) {
          return std::pow(p.A_off + p.a_f * z + p.c_f * v, ea) *
                 std::pow(z, p_val - 1.0);
        },
        0.0, u_a, rel_tol);
  }
  if (u_b > 0.0) {
    h += adaptive_gauss_legendre(
        [&](double z) {
          return std::pow(p.B_off + p.b_f * z + p.d_f * v, eb) *
                 std::pow(z, p_val - 1.0);
        },
        0.0, u_b, rel_tol);
  }
  return h;
}

double energy_Ep(const FastState& s, double p_val, const ModelParams& p,
                 double rel_tol) {
  const int n = s.u_a.grid.cells;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += energy_density(s.u_a.values[i], s.u_b.values[i], s.v.values[i], p_val,
                          p, rel_tol);
  return s.u_a.grid.dx() * sum;
}

double fast_dissipation(const FastState& s, double eps, const ModelParams& p) {
  if (!(eps > 0.0)) throw std::domain_error("fast_dissipation: eps must be > 0");
  const int n = s.u_a.grid.cells;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const QEval e = eval_Q(s.u_a.values[i], s.u_b.values[i], s.v.values[i], p);
    sum -= e.lambda * e.Q * e.Q;  // each term <= 0
  }
  return s.u_a.grid.dx() * sum / eps;
}

EnergyReport energy_report(const FastState& s, double p_val, const ModelParams& p,
                           double manifold_tol) {
  const int n = s.u_a.grid.cells;
  const double h = s.u_a.grid.dx();
  EnergyReport r;
  r.p = p_val;
  r.E_p = energy_Ep(s, p_val, p);
  r.I2_fast = fast_dissipation(s, s.eps, p);
  double q2 = 0.0, md2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ua = s.u_a.values[i], ub = s.u_b.values[i], vv = s.v.values[i];
    const QEval e = eval_Q(ua, ub, vv, p);
    q2 += e.Q * e.Q;
    const ManifoldPoint pt = solve_manifold(ua + ub, vv, p, manifold_tol);
    const double w = ub - pt.u_b_star;
    md2 += w * w;
  }
  r.Q_L2 = std::sqrt(h * q2);
  r.manifold_dist = std::sqrt(h * md2);
  const ExponentTable t = exponents(std::max(p_val, 1.0 + 1e-12), p);
  r.lp_norm_ua = norm_lp(s.u_a, t.q_p);
  r.lp_norm_ub = norm_lp(s.u_b, t.r_p);
  return r;
}

double rate_functional(const FastState& fast, const LimitState& limit, double eps,
                       const RateWeights& w, double delta, const ModelParams& p) {
  if (!(fast.u_a.grid == limit.u.grid))
    throw std::invalid_argument("rate_functional: grid mismatch");
  if (!(eps > 0.0) || !(w.gamma1 > 0.0) || !(w.gamma2 > 0.0) || !(w.gamma3 > 0.0))
    throw std::domain_error("rate_functional: eps and gammas must be positive");
  if (!(delta > 0.0))
    throw std::domain_error("rate_functional: delta = d_b - d_a must be positive");

  const int n = fast.u_a.grid.cells;
  const double h = fast.u_a.grid.dx();

  auto qtilde = [&p](double x, double y, double z) {
    return eval_Q_signed(x - y, y, z, p);
  };
  // P(x,y,z) = int_0^x Qt(xi,y,z) dxi and its z-derivative, by quadrature.
  auto P = [&](double x, double y, double z) {
    if (x == 0.0) return 0.0;
    return adaptive_gauss_legendre(
        [&](double xi) { return qtilde(xi, y, z); }, 0.0, x, kQuadRelTol);
  };
  auto P3 = [&](double x, double y, double z) {
    if (x == 0.0) return 0.0;
    return adaptive_gauss_legendre(
        [&](double xi) { return d3Q_signed(xi - y, y, z, p); }, 0.0, x,
        kQuadRelTol);
  };

  Array U(n), V(n), W(n);
  double energy_term = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ue = fast.u_a.values[i] + fast.u_b.values[i];
    const double ul = limit.u.values[i];
    const double vl = limit.v.values[i];
    const ManifoldPoint pt = solve_manifold(ul, vl, p);
    U[i] = ue - ul;
    V[i] = fast.v.values[i] - vl;
    W[i] = fast.u_b.values[i] - pt.u_b_star;
    const double y = pt.u_b_star;
    energy_term -= P(ue, y, fast.v.values[i]) - P(ul, y, vl) -
                   qtilde(ul, y, vl) * U[i] - P3(ul, y, vl) * V[i];
  }
  energy_term *= h;

  const double u2 = h * U.square().sum();
  const double v2 = h * V.square().sum();
  const double w2 = h * W.square().sum();
  const double gw = h1_seminorm_array(W, h);
  return 0.5 * w.gamma1 * u2 + 0.5 * w.gamma2 * v2 + 0.5 * eps * w.gamma3 * w2 +
         0.5 * eps * delta * gw * gw + energy_term;
}

}  // namespace crossdiff
