/* Energy diagnostics.
 *
 * The model carries a family of energies E_p = int_Omega h_p dx with density
 *
 *   h_p(u_a, u_b, v) = int_0^{u_a} theta(z,v)^{alpha(p-1)} z^{p-1} dz
 *                    + int_0^{u_b} omega(z,v)^{beta(p-1)}  z^{p-1} dz,
 *
 *   theta(z,v) = A_off + a_f z + c_f v,  omega(z,v) = B_off + b_f z + d_f v.
 *
 * The fast-reaction contribution to dE_2/dt is -(1/eps) int Lambda Q^2 <= 0,
 * which is what makes these energies eps-uniform and is monitored here, along
 * with the manifold distance and the rate functional L(t) used to measure the
 * eps-convergence of the fast system toward the cross-diffusion limit. */
#pragma once

#include <functional>

#include "crossdiff/manifold.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/state.hpp"

namespace crossdiff {

inline constexpr double kQuadRelTol = 1e-10;

/// Adaptive Gauss-Legendre quadrature of f over [a, b] to a relative
/// tolerance. Throws std::runtime_error if the recursion does not settle.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double a,
                               double b, double rel_tol = kQuadRelTol);

/// Total energy density h_p at a nonnegative state, p > 1 (p -> 1 gives
/// u_a + u_b).
double energy_density(double u_a, double u_b, double v, double p_val,
                      const ModelParams& p, double rel_tol = kQuadRelTol);

/// Midpoint-rule integral of the energy density over the domain.
double energy_Ep(const FastState& s, double p_val, const ModelParams& p,
                 double rel_tol = kQuadRelTol);

/// -(1/eps) int_Omega Lambda Q^2 dx; the integrand is pointwise <= 0.
double fast_dissipation(const FastState& s, double eps, const ModelParams& p);

struct EnergyReport {
  double p;
  double E_p;
  double I2_fast;        // <= 0
  double Q_L2;           // |Q|_L2(Omega)
  double manifold_dist;  // |u_b - u_b*(u_a+u_b, v)|_L2 <= Q_L2
  double lp_norm_ua;     // |u_a|_{q(p)}
  double lp_norm_ub;     // |u_b|_{r(p)}
};
EnergyReport energy_report(const FastState& s, double p_val, const ModelParams& p,
                           double manifold_tol = kManifoldTol);

struct RateWeights {
  double gamma1 = 1.0;
  double gamma2 = 100.0;
  double gamma3 = 100.0;
};

/// The functional
///   L(t) = g1/2 |U|^2 + g2/2 |V|^2 + eps g3/2 |W|^2 + eps delta/2 |grad W|^2
///        + E(t),
/// with U = u^eps - u, V = v^eps - v, W = u_b^eps - u_b*(u, v) and E(t) the
/// Taylor remainder of P(x,y,z) = int_0^x Q(xi - y, y, z) dxi in (x, z) around
/// the limit state. Requires matching grids, eps > 0 and delta = d_b - d_a > 0.
double rate_functional(const FastState& fast, const LimitState& limit, double eps,
                       const RateWeights& w, double delta, const ModelParams& p);

}  // namespace crossdiff
