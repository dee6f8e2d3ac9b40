#include "crossdiff/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossdiff {

namespace {

struct Qt {
  double u, v;
  const ModelParams& p;
  double operator()(double ub) const {
    return eval_Q(u - ub, ub, v, p).q;  // strictly increasing in ub
  }
  double slope(double ub) const {
    const QGrad g = grad_q(u - ub, ub, v, p);
    return g.gap;  // >= A_off^alpha + B_off^beta > 0
  }
};

ManifoldPoint finish(double u, double v, double ub, double res) {
  ManifoldPoint pt;
  pt.u_tilde = u;
  pt.v_tilde = v;
  pt.u_b_star = ub;
  pt.u_a_star = u - ub;
  pt.residual = std::abs(res);
  return pt;
}

/// Newton polish inside a known bracket [lo, hi] with qt(lo) <= 0 <= qt(hi).
ManifoldPoint polish(const Qt& qt, double u, double v, double lo, double hi,
                     double x, double abs_tol) {
  double fx = qt(x);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fx) <= abs_tol) return finish(u, v, x, fx);
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double step = fx / qt.slope(x);
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == x) return finish(u, v, x, fx);
    x = xn;
    fx = qt(x);
  }
  throw std::runtime_error("solve_manifold: root polish did not converge");
}

}  // namespace

ManifoldPoint solve_manifold(double u_tilde, double v_tilde, const ModelParams& p,
                             double tol) {
  if (!(u_tilde >= 0.0) || !(v_tilde >= 0.0))
    throw std::domain_error("solve_manifold: arguments must be nonnegative");
  if (!(tol > 0.0)) throw std::domain_error("solve_manifold: tol must be positive");
  if (u_tilde == 0.0) return finish(0.0, v_tilde, 0.0, 0.0);

  const Qt qt{u_tilde, v_tilde, p};
  const double scale =
      eval_Q(u_tilde, 0.0, v_tilde, p).lambda * std::max(u_tilde, 1.0);
  const double abs_tol = tol * scale;

  // Bracket is [0, u]: qt(0) = -psi*u <= 0, qt(u) = phi*u >= 0.
  double lo = 0.0, hi = u_tilde;
  const double coarse = 1e-3 * std::max(u_tilde, 1.0);
  while (hi - lo > coarse) {
    const double mid = 0.5 * (lo + hi);
    if (qt(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return polish(qt, u_tilde, v_tilde, lo, hi, 0.5 * (lo + hi), abs_tol);
}

ManifoldPoint solve_manifold_warm(double u_tilde, double v_tilde,
                                  const ModelParams& p, double guess, double tol) {
  if (!(u_tilde >= 0.0) || !(v_tilde >= 0.0))
    throw std::domain_error("solve_manifold: arguments must be nonnegative");
  if (u_tilde == 0.0) return finish(0.0, v_tilde, 0.0, 0.0);
  const Qt qt{u_tilde, v_tilde, p};
  const double scale =
      eval_Q(u_tilde, 0.0, v_tilde, p).lambda * std::max(u_tilde, 1.0);
  return polish(qt, u_tilde, v_tilde, 0.0, u_tilde,
                std::clamp(guess, 0.0, u_tilde), tol * scale);
}

ManifoldJacobian manifold_jacobian(const ManifoldPoint& pt, const ModelParams& p) {
  const QGrad g = grad_q(pt.u_a_star, pt.u_b_star, pt.v_tilde, p);
  const double denom = g.d1 - g.d2;  // <= -(A_off^alpha + B_off^beta) < 0
  ManifoldJacobian j;
  j.du_ub = g.d1 / denom;
  j.dv_ub = g.d3 / denom;
  j.du_ua = 1.0 - j.du_ub;
  j.dv_ua = -j.dv_ub;
  const double delta = p.d_b - p.d_a;
  j.dA_du = p.d_a + delta * j.du_ub;
  j.dA_dv = delta * j.dv_ub;
  return j;
}

FluxEval eval_A(double u, double v, const ModelParams& p, double tol) {
  const ManifoldPoint pt = solve_manifold(u, v, p, tol);
  const ManifoldJacobian j = manifold_jacobian(pt, p);
  return {p.d_a * u + (p.d_b - p.d_a) * pt.u_b_star, j.dA_du, j.dA_dv};
}

}  // namespace crossdiff
