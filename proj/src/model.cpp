#include "crossdiff/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace crossdiff {

namespace {

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0)) {
    throw std::domain_error(std::string(name) + " must be nonnegative, got " +
                            std::to_string(x));
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

HypothesisReport validate_params(const ModelParams& p) {
  const double fields[] = {p.d_a,     p.d_b,     p.d_v,   p.eta_a, p.eta_b,
                           p.eta_v1,  p.eta_v2,  p.a,     p.b,     p.c,
                           p.d,       p.gamma_a, p.gamma_b, p.a_f, p.b_f,
                           p.c_f,     p.d_f,     p.alpha, p.beta,  p.A_off,
                           p.B_off};
  for (double x : fields) {
    if (!std::isfinite(x)) throw std::domain_error("invalid parameter value");
  }

  HypothesisReport rep;
  auto violate = [&rep](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };

  if (!(p.alpha > 0.0 && p.alpha <= p.beta))
    violate("(H1): requires 0 < alpha <= beta, got alpha=" + fmt(p.alpha) +
            " beta=" + fmt(p.beta));
  if (!(p.A_off > 0.0)) violate("(H1): requires A_off > 0, got " + fmt(p.A_off));
  if (p.B_off < 0.0) violate("(H1): requires B_off >= 0, got " + fmt(p.B_off));
  if (p.beta < 1.0 && !(p.B_off > 0.0))
    violate("(H1): requires B_off > 0 when beta < 1 (\"B>0 if β<1\")");

  const double gap = p.beta - p.alpha;
  if (!(gap >= 0.0 && gap < 2.0 * (p.alpha + 3.0)))
    violate("(H2): requires 0 <= beta-alpha < 2(alpha+3), got beta-alpha=" +
            fmt(gap) + " vs 2(alpha+3)=" + fmt(2.0 * (p.alpha + 3.0)));

  if (p.a_f > p.a) violate("(H3): requires a_f <= a");
  if (p.b_f > p.b) violate("(H3): requires b_f <= b");
  if (p.c_f > p.c) violate("(H3): requires c_f <= c");
  if (p.d_f > p.d) violate("(H3): requires d_f <= d");

  if (p.a_f == 0.0 && p.c_f == 0.0)
    violate("nondegeneracy: requires (a_f, c_f) != (0,0)");
  if (p.b_f == 0.0 && p.d_f == 0.0)
    violate("nondegeneracy: requires (b_f, d_f) != (0,0)");
  if (p.c * p.eta_v1 == 0.0 && p.d * p.eta_v2 == 0.0)
    violate("nondegeneracy: requires (c*eta_v1, d*eta_v2) != (0,0)");

  const double positives[] = {p.d_a, p.d_b, p.d_v, p.eta_a, p.eta_b,
                              p.a,   p.b,   p.alpha, p.beta};
  const char* names[] = {"d_a", "d_b", "d_v", "eta_a", "eta_b",
                         "a",   "b",   "alpha", "beta"};
  for (int i = 0; i < 9; ++i) {
    if (!(positives[i] > 0.0))
      violate(std::string("positivity: requires ") + names[i] + " > 0");
  }
  const double nonnegatives[] = {p.eta_v1, p.eta_v2, p.c, p.d,
                                 p.gamma_a, p.gamma_b, p.a_f, p.b_f,
                                 p.c_f, p.d_f};
  const char* nn_names[] = {"eta_v1", "eta_v2", "c", "d", "gamma_a",
                            "gamma_b", "a_f", "b_f", "c_f", "d_f"};
  for (int i = 0; i < 10; ++i) {
    if (nonnegatives[i] < 0.0)
      violate(std::string("positivity: requires ") + nn_names[i] + " >= 0");
  }
  return rep;
}

double psi_of(double x, const ModelParams& p) {
  return std::pow(p.A_off + x, p.alpha);
}

double phi_of(double x, const ModelParams& p) {
  return std::pow(p.B_off + x, p.beta);
}

double psi_prime(double x, const ModelParams& p) {
  return p.alpha * std::pow(p.A_off + x, p.alpha - 1.0);
}

double phi_prime(double x, const ModelParams& p) {
  return p.beta * std::pow(p.B_off + x, p.beta - 1.0);
}

Transitions transitions(double x, const ModelParams& p) {
  require_nonnegative(x, "transition argument");
  return {psi_of(x, p), phi_of(x, p)};
}

QEval eval_Q(double u_a, double u_b, double v, const ModelParams& p) {
  require_nonnegative(u_a, "u_a");
  require_nonnegative(u_b, "u_b");
  require_nonnegative(v, "v");
  const double psi = psi_of(p.a_f * u_a + p.c_f * v, p);
  const double phi = phi_of(p.b_f * u_b + p.d_f * v, p);
  QEval e;
  e.q = phi * u_b - psi * u_a;
  e.lambda = phi + psi;
  e.Q = e.q / e.lambda;
  e.lambda_a = psi / e.lambda;
  e.lambda_b = phi / e.lambda;
  return e;
}

double eval_Q_signed(double u_a, double u_b, double v, const ModelParams& p) {
  require_nonnegative(u_b, "u_b");
  require_nonnegative(v, "v");
  const double theta = p.A_off + p.a_f * u_a + p.c_f * v;
  if (!(theta > 0.0)) {
    throw std::domain_error("eval_Q_signed: psi base " + std::to_string(theta) +
                            " is not positive");
  }
  const double psi = std::pow(theta, p.alpha);
  const double phi = phi_of(p.b_f * u_b + p.d_f * v, p);
  return (phi * u_b - psi * u_a) / (phi + psi);
}

double d3Q_signed(double u_a, double u_b, double v, const ModelParams& p) {
  require_nonnegative(u_b, "u_b");
  require_nonnegative(v, "v");
  const double theta = p.A_off + p.a_f * u_a + p.c_f * v;
  if (!(theta > 0.0)) {
    throw std::domain_error("d3Q_signed: psi base " + std::to_string(theta) +
                            " is not positive");
  }
  const double psi = std::pow(theta, p.alpha);
  const double psip = p.alpha * std::pow(theta, p.alpha - 1.0);
  const double phi = phi_of(p.b_f * u_b + p.d_f * v, p);
  const double phip = phi_prime(p.b_f * u_b + p.d_f * v, p);
  const double lam = phi + psi;
  const double q = phi * u_b - psi * u_a;
  const double d3q = p.d_f * u_b * phip - p.c_f * u_a * psip;
  const double d3lam = p.c_f * psip + p.d_f * phip;
  return (d3q * lam - q * d3lam) / (lam * lam);
}

Reactions eval_reactions(double u_a, double u_b, double v, const ModelParams& p) {
  require_nonnegative(u_a, "u_a");
  require_nonnegative(u_b, "u_b");
  require_nonnegative(v, "v");
  Reactions r;
  r.f_a = p.eta_a * u_a * (1.0 - p.a * u_a - p.c * v) - p.gamma_a * u_a * u_b;
  r.f_b = p.eta_b * u_b * (1.0 - p.b * u_b - p.d * v) - p.gamma_b * u_a * u_b;
  r.f_v = p.eta_v1 * v * (1.0 - p.a * u_a - p.c * v) +
          p.eta_v2 * v * (1.0 - p.b * u_b - p.d * v);
  r.f_u = r.f_a + r.f_b;
  return r;
}

QGrad grad_q(double u_a, double u_b, double v, const ModelParams& p) {
  require_nonnegative(u_a, "u_a");
  require_nonnegative(u_b, "u_b");
  require_nonnegative(v, "v");
  const double xa = p.a_f * u_a + p.c_f * v;
  const double xb = p.b_f * u_b + p.d_f * v;
  const double psi = psi_of(xa, p);
  const double phi = phi_of(xb, p);
  const double psip = psi_prime(xa, p);
  const double phip = phi_prime(xb, p);
  QGrad g;
  g.d1 = -psi - p.a_f * u_a * psip;
  g.d2 = phi + p.b_f * u_b * phip;
  g.d3 = p.d_f * u_b * phip - p.c_f * u_a * psip;
  g.gap = g.d2 - g.d1;
  return g;
}

QGradFull grad_Q(double u_a, double u_b, double v, const ModelParams& p) {
  const QEval e = eval_Q(u_a, u_b, v, p);
  const QGrad gq = grad_q(u_a, u_b, v, p);
  const double xa = p.a_f * u_a + p.c_f * v;
  const double xb = p.b_f * u_b + p.d_f * v;
  const double psip = psi_prime(xa, p);
  const double phip = phi_prime(xb, p);
  const double d1lam = p.a_f * psip;
  const double d2lam = p.b_f * phip;
  const double d3lam = p.c_f * psip + p.d_f * phip;
  const double lam2 = e.lambda * e.lambda;
  QGradFull g;
  g.d1 = (gq.d1 * e.lambda - e.q * d1lam) / lam2;
  g.d2 = (gq.d2 * e.lambda - e.q * d2lam) / lam2;
  g.d3 = (gq.d3 * e.lambda - e.q * d3lam) / lam2;
  return g;
}

double d2_Qtilde(double u, double u_b, double v, const ModelParams& p) {
  const QGradFull g = grad_Q(u - u_b, u_b, v, p);
  return g.d2 - g.d1;
}

ExponentTable exponents(double p_val, const ModelParams& p) {
  if (!(p_val > 1.0)) {
    throw std::domain_error("exponents: p must be > 1, got " +
                            std::to_string(p_val));
  }
  ExponentTable t;
  t.p = p_val;
  t.q_p = p_val + p.alpha * (p_val - 1.0);
  t.r_p = p_val + p.beta * (p_val - 1.0);
  t.p_alpha = 1.0 + 1.0 / (1.0 + p.alpha);
  t.p_beta = 1.0 + 1.0 / (1.0 + p.beta);

  const double gap = p.beta - p.alpha;
  const double lo = 2.0 * (p.alpha + 1.0);
  if (gap > lo) {
    // Scan the nested intervals I_n = (2(alpha+1), 2(alpha+1) + 4/(alpha+1)^n]
    // for the last one still containing beta-alpha.
    int n = 0;
    while (n < 100000 && gap <= lo + 4.0 / std::pow(p.alpha + 1.0, n + 1)) ++n;
    if (n >= 100000)
      throw std::domain_error("exponents: n_ab scan did not terminate");
    if (gap > lo + 4.0 / std::pow(p.alpha + 1.0, n))
      throw std::domain_error("exponents: beta-alpha outside every I_n; (H2) violated?");
    t.has_n_ab = true;
    t.n_ab = n;
    t.p0_ab = 1.0 + 4.0 / (p.beta - 3.0 * p.alpha - 2.0);
  }

  t.in_basic_range = (p_val >= t.p_beta && p_val <= t.p_alpha);
  if (p_val >= 2.0) {
    t.in_bootstrap_range =
        !t.has_n_ab || p_val <= 1.0 + std::pow(p.alpha + 1.0, t.n_ab);
  }
  return t;
}

}  // namespace crossdiff
