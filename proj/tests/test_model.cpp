#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "crossdiff/model.hpp"

using namespace crossdiff;

namespace {

ModelParams symmetric_params() {
  ModelParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.A_off = 1.0;
  p.B_off = 1.0;
  p.a_f = 1.0;
  p.b_f = 1.0;
  p.c_f = 0.0;
  p.d_f = 0.0;
  p.a = 1.0;
  p.b = 1.0;
  p.c = 0.0;
  p.d = 0.5;  // keep (d*eta_v2) nonzero
  return p;
}

}  // namespace

TEST_CASE("validate_params accepts the reference configuration") {
  ModelParams p;
  p.alpha = 1.0;
  p.beta = 2.0;
  p.A_off = 1.0;
  p.B_off = 0.0;  // allowed since beta >= 1
  p.a_f = p.b_f = p.c_f = p.d_f = 0.5;
  p.a = p.b = p.c = p.d = 1.0;
  const auto rep = validate_params(p);
  CHECK(rep.ok);
  CHECK(rep.violations.empty());
}

TEST_CASE("validate_params flags the (H2) boundary") {
  ModelParams p;
  p.alpha = 1.0;
  p.beta = 9.0;  // beta - alpha = 8 = 2(alpha+3)
  p.a_f = p.b_f = p.c_f = p.d_f = 0.5;
  p.a = p.b = p.c = p.d = 1.0;
  const auto rep = validate_params(p);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.violations.size() >= 1);
  bool found = false;
  for (const auto& v : rep.violations) found |= v.find("(H2)") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validate_params requires B_off > 0 below beta = 1") {
  ModelParams p;
  p.alpha = 0.5;
  p.beta = 0.5;
  p.B_off = 0.0;
  const auto rep = validate_params(p);
  CHECK_FALSE(rep.ok);
  bool found = false;
  for (const auto& v : rep.violations) found |= v.find("(H1)") != std::string::npos;
  CHECK(found);
}

TEST_CASE("validate_params rejects non-finite input") {
  ModelParams p;
  p.d_a = std::nan("");
  CHECK_THROWS_AS(validate_params(p), std::domain_error);
}

TEST_CASE("validate_params flags (H3) and nondegeneracy") {
  ModelParams p;
  p.a_f = 2.0;  // > a = 1
  auto rep = validate_params(p);
  CHECK_FALSE(rep.ok);

  ModelParams q;
  q.a_f = 0.0;
  q.c_f = 0.0;
  rep = validate_params(q);
  CHECK_FALSE(rep.ok);
}

TEST_CASE("transitions evaluate the power laws") {
  ModelParams p;
  p.A_off = 1.0;
  p.alpha = 2.0;
  CHECK(transitions(0.0, p).psi == doctest::Approx(1.0));
  CHECK(transitions(3.0, p).psi == doctest::Approx(16.0));

  p.alpha = 1.0;
  p.B_off = 1.0;
  p.beta = 1.0;
  const auto t = transitions(1.0, p);
  CHECK(t.psi == doctest::Approx(2.0));
  CHECK(t.phi == doctest::Approx(2.0));

  CHECK_THROWS_AS(transitions(-0.1, p), std::domain_error);
}

TEST_CASE("eval_Q on hand states") {
  const ModelParams p = symmetric_params();

  SUBCASE("symmetric state has Q = 0") {
    const QEval e = eval_Q(1.0, 1.0, 0.0, p);
    CHECK(e.Q == doctest::Approx(0.0));
    CHECK(e.lambda_a + e.lambda_b == doctest::Approx(1.0));
  }
  SUBCASE("one-sided state") {
    const QEval e = eval_Q(0.0, 1.0, 0.0, p);
    CHECK(e.q == doctest::Approx(2.0));
    CHECK(e.lambda == doctest::Approx(3.0));
    CHECK(e.Q == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("zero state") {
    const QEval e = eval_Q(0.0, 0.0, 0.0, p);
    CHECK(e.q == 0.0);
    CHECK(e.Q == 0.0);
  }
  SUBCASE("negative input is a domain error") {
    CHECK_THROWS_AS(eval_Q(-1.0, 0.0, 0.0, p), std::domain_error);
  }
}

TEST_CASE("eval_reactions matches the competition expressions") {
  ModelParams p;
  SUBCASE("u_a factor") {
    const Reactions r = eval_reactions(0.0, 0.7, 0.3, p);
    CHECK(r.f_a == 0.0);
  }
  SUBCASE("hand value") {
    ModelParams q;
    q.eta_a = 1.0;
    q.a = 1.0;
    q.c = 0.0;
    q.gamma_a = 0.0;
    const Reactions r = eval_reactions(2.0, 0.0, 0.0, q);
    CHECK(r.f_a == doctest::Approx(-2.0));
  }
  SUBCASE("v factor") {
    const Reactions r = eval_reactions(0.4, 0.7, 0.0, p);
    CHECK(r.f_v == 0.0);
  }
  SUBCASE("f_u = f_a + f_b") {
    const Reactions r = eval_reactions(0.4, 0.7, 0.2, p);
    CHECK(r.f_u == doctest::Approx(r.f_a + r.f_b));
  }
}

TEST_CASE("grad_q: structure and centered finite differences") {
  ModelParams p;
  p.alpha = 1.3;
  p.beta = 2.1;
  p.A_off = 0.7;
  p.B_off = 0.4;

  SUBCASE("vanishing u-terms") {
    const double v = 0.8;
    const QGrad g = grad_q(0.0, 0.0, v, p);
    CHECK(g.d1 == doctest::Approx(-psi_of(p.c_f * v, p)));
    CHECK(g.d2 == doctest::Approx(phi_of(p.d_f * v, p)));
    CHECK(g.d3 == doctest::Approx(0.0));
  }
  SUBCASE("symmetric point") {
    const ModelParams s = symmetric_params();
    const QGrad g = grad_q(1.5, 1.5, 0.0, s);
    CHECK(g.d2 == doctest::Approx(-g.d1));
  }
  SUBCASE("finite differences at 1000 random points in (0,10)^3") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.01, 10.0);
    const double step = 1e-6;
    for (int trial = 0; trial < 1000; ++trial) {
      const double ua = uni(rng), ub = uni(rng), vv = uni(rng);
      const QGrad g = grad_q(ua, ub, vv, p);
      CHECK(g.d1 < 0.0);
      CHECK(g.d2 > 0.0);
      CHECK(g.gap >= std::pow(p.A_off, p.alpha) + std::pow(p.B_off, p.beta) - 1e-12);
      auto qval = [&](double x, double y, double z) {
        return eval_Q(x, y, z, p).q;
      };
      const double scale = std::abs(qval(ua, ub, vv)) + 1.0;
      const double fd1 = (qval(ua + step, ub, vv) - qval(ua - step, ub, vv)) / (2 * step);
      const double fd2 = (qval(ua, ub + step, vv) - qval(ua, ub - step, vv)) / (2 * step);
      const double fd3 = (qval(ua, ub, vv + step) - qval(ua, ub, vv - step)) / (2 * step);
      CHECK(g.d1 == doctest::Approx(fd1).epsilon(1e-6).scale(scale));
      CHECK(g.d2 == doctest::Approx(fd2).epsilon(1e-6).scale(scale));
      CHECK(g.d3 == doctest::Approx(fd3).epsilon(1e-6).scale(scale));
    }
  }
}

TEST_CASE("relative satisfaction measures are monotone; q and Q share sign") {
  ModelParams p;
  p.alpha = 1.5;
  p.beta = 2.5;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double ua = uni(rng), ub = uni(rng), vv = uni(rng);
    const double bump = uni(rng);
    CHECK(eval_Q(ua + bump, ub, vv, p).lambda_a >=
          eval_Q(ua, ub, vv, p).lambda_a - 1e-14);
    CHECK(eval_Q(ua, ub + bump, vv, p).lambda_b >=
          eval_Q(ua, ub, vv, p).lambda_b - 1e-14);
    const QEval e = eval_Q(ua, ub, vv, p);
    CHECK(e.q * e.Q >= 0.0);
    CHECK(e.lambda >= std::pow(p.A_off, p.alpha) + std::pow(p.B_off, p.beta) - 1e-12);
    CHECK(e.lambda_a > 0.0);
    CHECK(e.lambda_a < 1.0);
  }
}

TEST_CASE("exponents table") {
  SUBCASE("q(p_alpha) = r(p_beta) = 2 to machine precision") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 1.0;
    const ExponentTable t = exponents(1.5, p);
    CHECK(t.q_p == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(t.p_alpha == doctest::Approx(1.5).epsilon(1e-14));

    ModelParams q;
    q.alpha = 0.7;
    q.beta = 2.3;
    const ExponentTable ta = exponents(exponents(2.0, q).p_alpha, q);
    CHECK(ta.q_p == doctest::Approx(2.0).epsilon(1e-14));
    const ExponentTable tb = exponents(exponents(2.0, q).p_beta, q);
    CHECK(tb.r_p == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(tb.p_beta <= tb.p_alpha);
    CHECK(tb.q_p <= tb.r_p);
  }
  SUBCASE("direct substitution") {
    ModelParams p;
    p.alpha = 1.0;
    p.beta = 2.0;
    const ExponentTable t = exponents(2.0, p);
    CHECK(t.q_p == doctest::Approx(3.0));
    CHECK(t.r_p == doctest::Approx(4.0));
    CHECK_FALSE(t.has_n_ab);  // beta-alpha = 1 <= 2(alpha+1) = 4
    CHECK(std::isinf(t.p0_ab));
    CHECK(t.in_bootstrap_range);
  }
  SUBCASE("interval scan for n_ab") {
    ModelParams p;
    p.alpha = 0.5;
    p.beta = 7.0;  // beta-alpha = 6.5 in (3, 7)
    const ExponentTable t = exponents(2.0, p);
    REQUIRE(t.has_n_ab);
    // oracle: scan I_n = (3, 3 + 4/1.5^n] directly
    int expected = -1;
    for (int n = 0; n <= 64; ++n) {
      const double hi = 3.0 + 4.0 / std::pow(1.5, n);
      if (6.5 > 3.0 && 6.5 <= hi) expected = n;
    }
    CHECK(t.n_ab == expected);
    CHECK(t.p0_ab == doctest::Approx(1.0 + 4.0 / (7.0 - 1.5 - 2.0)));
    // bootstrap ceiling: p <= 1 + (alpha+1)^{n_ab} = 2
    CHECK(t.in_bootstrap_range);
    CHECK_FALSE(exponents(2.5, p).in_bootstrap_range);
  }
  SUBCASE("domain error at p <= 1") {
    ModelParams p;
    CHECK_THROWS_AS(exponents(1.0, p), std::domain_error);
  }
}
