/* -----------------------------------------------------------------------------
 * Two-species slow-fast competition model.
 *
 * Species u splits into states a and b with densities u_a, u_b and switches
 * between them at rate 1/eps. The slow species has density v. Reactions are
 * Lotka-Volterra competition,
 *
 *   f_a = eta_a u_a (1 - a u_a - c v) - gamma_a u_a u_b
 *   f_b = eta_b u_b (1 - b u_b - d v) - gamma_b u_a u_b
 *   f_v = eta_v1 v (1 - a u_a - c v) + eta_v2 v (1 - b u_b - d v)
 *
 * and the switching term is Q = q / Lambda with
 *
 *   q      = phi(b_f u_b + d_f v) u_b - psi(a_f u_a + c_f v) u_a
 *   Lambda = phi(b_f u_b + d_f v) + psi(a_f u_a + c_f v)
 *   psi(x) = (A_off + x)^alpha,  phi(x) = (B_off + x)^beta.
 *
 * This header holds the parameter set, the hypothesis checks (H1)-(H3), the
 * pointwise evaluation of all model functions and their analytic derivatives,
 * and the exponent bookkeeping q(p), r(p), p_alpha, p_beta, n_ab, p0_ab used
 * by the energy diagnostics.
 * -------------------------------------------------------------------------- */
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace crossdiff {

struct ModelParams {
  // diffusivities
  double d_a = 1.0;
  double d_b = 1.05;
  double d_v = 1.0;
  // growth rates
  double eta_a = 1.0;
  double eta_b = 1.0;
  double eta_v1 = 1.0;  // eta'_v
  double eta_v2 = 1.0;  // eta''_v
  // competition coefficients
  double a = 1.0;
  double b = 1.0;
  double c = 0.5;
  double d = 0.5;
  double gamma_a = 0.1;
  double gamma_b = 0.1;
  // switching sensitivities
  double a_f = 0.5;
  double b_f = 0.5;
  double c_f = 0.5;
  double d_f = 0.5;
  // transition exponents and offsets
  double alpha = 1.0;
  double beta = 1.0;
  double A_off = 1.0;
  double B_off = 1.0;

  double eta_bar() const { return eta_a > eta_b ? eta_a : eta_b; }
  double eta_low() const { return a * eta_a < b * eta_b ? a * eta_a : b * eta_b; }
  double eta_v() const { return eta_v1 + eta_v2; }
  double r_v() const { return c * eta_v1 + d * eta_v2; }
};

/// Result of checking (H1)-(H3) and the nondegeneracy conditions.
struct HypothesisReport {
  bool ok = true;
  std::vector<std::string> violations;  // e.g. "(H2): beta-alpha=8 >= 2(alpha+3)=8"
};

/// Checks (H1), (H2), (H3) and nondegeneracy of the switching/competition
/// coefficients. Throws std::domain_error on non-finite input.
HypothesisReport validate_params(const ModelParams& p);

/// Transition functions psi(x) = (A_off+x)^alpha, phi(x) = (B_off+x)^beta, x >= 0.
struct Transitions {
  double psi;
  double phi;
};
Transitions transitions(double x, const ModelParams& p);

double psi_of(double x, const ModelParams& p);
double phi_of(double x, const ModelParams& p);
double psi_prime(double x, const ModelParams& p);
double phi_prime(double x, const ModelParams& p);

/// Switching kernel at a nonnegative state.
struct QEval {
  double q;
  double lambda;    // phi + psi >= A_off^alpha + B_off^beta > 0
  double Q;         // q / lambda
  double lambda_a;  // psi / lambda
  double lambda_b;  // phi / lambda, lambda_a + lambda_b = 1
};
QEval eval_Q(double u_a, double u_b, double v, const ModelParams& p);

/// Q(u_a, u_b, v) with u_a allowed to be negative as long as the psi base
/// A_off + a_f u_a + c_f v stays positive. Used by the rate functional, whose
/// Taylor form integrates Q(xi - y, y, z) for xi below y.
double eval_Q_signed(double u_a, double u_b, double v, const ModelParams& p);
double d3Q_signed(double u_a, double u_b, double v, const ModelParams& p);

/// Lotka-Volterra reactions; f_u = f_a + f_b.
struct Reactions {
  double f_a;
  double f_b;
  double f_v;
  double f_u;
};
Reactions eval_reactions(double u_a, double u_b, double v, const ModelParams& p);

/// Analytic gradient of q. gap = d2 - d1 >= A_off^alpha + B_off^beta.
struct QGrad {
  double d1;  // -psi - a_f u_a psi' < 0
  double d2;  // phi + b_f u_b phi' > 0
  double d3;  // d_f u_b phi' - c_f u_a psi'
  double gap;
};
QGrad grad_q(double u_a, double u_b, double v, const ModelParams& p);

/// Gradient of Q = q/Lambda.
struct QGradFull {
  double d1;
  double d2;
  double d3;
};
QGradFull grad_Q(double u_a, double u_b, double v, const ModelParams& p);

/// Derivative in u_b of Qtilde(u, u_b, v) = Q(u - u_b, u_b, v); always >= 1.
double d2_Qtilde(double u, double u_b, double v, const ModelParams& p);

/// Exponent bookkeeping at a given p > 1.
struct ExponentTable {
  double p;
  double q_p;      // p + alpha (p-1)
  double r_p;      // p + beta (p-1)
  double p_alpha;  // 1 + 1/(1+alpha), q(p_alpha) = 2
  double p_beta;   // 1 + 1/(1+beta),  r(p_beta) = 2
  bool has_n_ab = false;  // defined only when beta-alpha > 2(alpha+1)
  int n_ab = -1;          // largest n with beta-alpha in (2(alpha+1), 2(alpha+1)+4/(alpha+1)^n]
  double p0_ab = std::numeric_limits<double>::infinity();  // bootstrap ceiling
  bool in_basic_range = false;      // p in [p_beta, p_alpha]
  bool in_bootstrap_range = false;  // p >= 2 and below the bootstrap ceiling
};
ExponentTable exponents(double p_val, const ModelParams& p);

}  // namespace crossdiff
