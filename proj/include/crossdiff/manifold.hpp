/* Slow-manifold map: for given totals (u, v) the unique split (u_a*, u_b*)
 * with u_a* + u_b* = u and Q(u_a*, u_b*, v) = 0, its Jacobian through the
 * implicit function theorem, and the cross-diffusion flux
 * A(u, v) = d_a u + (d_b - d_a) u_b*(u, v). */
#pragma once

#include "crossdiff/model.hpp"

namespace crossdiff {

inline constexpr double kManifoldTol = 1e-12;

struct ManifoldPoint {
  double u_tilde;
  double v_tilde;
  double u_a_star;  // u_tilde - u_b_star, exact by construction
  double u_b_star;  // in [0, u_tilde]
  double residual;  // |q(u_a*, u_b*, v)| at the returned point
};

struct ManifoldJacobian {
  double du_ub;  // d u_b*/d u, in (0, 1)
  double dv_ub;  // d u_b*/d v
  double du_ua;  // 1 - du_ub
  double dv_ua;  // -dv_ub
  double dA_du;  // d_a + (d_b - d_a) du_ub
  double dA_dv;  // (d_b - d_a) dv_ub
};

/// Root of qt(u_b) = q(u - u_b, u_b, v) on [0, u] (qt is strictly increasing
/// with slope >= A_off^alpha + B_off^beta): bisection to a coarse bracket,
/// then Newton with bisection fallback. |qt| at the root <= tol * scale with
/// scale = Lambda(u, 0, v) * max(u, 1). u = 0 short-circuits to (0, 0).
ManifoldPoint solve_manifold(double u_tilde, double v_tilde, const ModelParams& p,
                             double tol = kManifoldTol);

/// Same root, Newton started from `guess` (previous step's root); falls back
/// to the full bracketed solve if the warm start stalls.
ManifoldPoint solve_manifold_warm(double u_tilde, double v_tilde,
                                  const ModelParams& p, double guess,
                                  double tol = kManifoldTol);

ManifoldJacobian manifold_jacobian(const ManifoldPoint& pt, const ModelParams& p);

struct FluxEval {
  double A_val;
  double dA_du;
  double dA_dv;
};
FluxEval eval_A(double u, double v, const ModelParams& p,
                double tol = kManifoldTol);

}  // namespace crossdiff
