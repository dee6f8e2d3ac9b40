#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "crossdiff/grid.hpp"

using namespace crossdiff;

namespace {

constexpr double kPi = 3.14159265358979323846;

Field cosine_field(const Grid& g, int mode) {
  Field f(g);
  const Array x = g.centers();
  for (int i = 0; i < g.cells; ++i)
    f.values[i] = std::cos(mode * kPi * x[i] / g.length);
  return f;
}

// random combination of low Fourier modes (Neumann-compatible, smooth)
Field random_smooth_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Field f(g);
  const Array x = g.centers();
  for (int k = 0; k <= 6; ++k) {
    const double c = coef(rng);
    for (int i = 0; i < g.cells; ++i)
      f.values[i] += c * std::cos(k * kPi * x[i] / g.length);
  }
  return f;
}

}  // namespace

TEST_CASE("laplacian: hand stencil") {
  Grid g{4.0, 4};  // h = 1
  Field f(g);
  f.values << 0.0, 1.0, 1.0, 0.0;
  const Field lap = laplacian_neumann(f);
  CHECK(lap.values[0] == doctest::Approx(1.0));
  CHECK(lap.values[1] == doctest::Approx(-1.0));
  CHECK(lap.values[2] == doctest::Approx(-1.0));
  CHECK(lap.values[3] == doctest::Approx(1.0));
}

TEST_CASE("laplacian: constants are in the kernel") {
  Grid g{2.0, 37};
  Field f(g, Array::Constant(37, 3.7));
  const Field lap = laplacian_neumann(f);
  CHECK(lap.values.abs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-30));
}

TEST_CASE("laplacian: cos(pi x / L) is an exact discrete eigenfield") {
  Grid g{1.0, 64};
  const double h = g.dx();
  const Field f = cosine_field(g, 1);
  const Field lap = laplacian_neumann(f);
  const double lam = -2.0 / (h * h) * (1.0 - std::cos(kPi * h / g.length));
  for (int i = 0; i < g.cells; ++i)
    CHECK(lap.values[i] == doctest::Approx(lam * f.values[i]).epsilon(1e-11));
}

TEST_CASE("laplacian: second-order accuracy on cos(pi x / L)") {
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    Grid g{1.0, n};
    const Field f = cosine_field(g, 1);
    const Field lap = laplacian_neumann(f);
    double err = 0.0;
    const Array x = g.centers();
    for (int i = 0; i < n; ++i) {
      const double exact = -kPi * kPi * std::cos(kPi * x[i]);
      err = std::max(err, std::abs(lap.values[i] - exact));
    }
    errs.push_back(err);
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.9);
  CHECK(order1 <= 2.1);
  CHECK(order2 >= 1.9);
  CHECK(order2 <= 2.1);
}

TEST_CASE("laplacian: discrete conservation under zero flux") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    Grid g{1.0, 32 + 8 * trial};
    const Field f = random_smooth_field(g, rng);
    const Field lap = laplacian_neumann(f);
    const double total = integral(lap);
    const double scale = f.values.abs().maxCoeff();
    CHECK(std::abs(total) <= 1e-12 * std::max(scale, 1.0));
  }
}

TEST_CASE("norm_lp") {
  SUBCASE("constant on (0,1)") {
    Grid g{1.0, 16};
    Field f(g, Array::Constant(16, -2.5));
    for (double p : {1.0, 2.0, 3.0, 7.5}) CHECK(norm_lp(f, p) == doctest::Approx(2.5));
    CHECK(norm_lp(f, std::numeric_limits<double>::infinity()) == doctest::Approx(2.5));
  }
  SUBCASE("hand value on 2 cells") {
    Array two(2);
    two << 3.0, 4.0;
    CHECK(norm_lp_array(two, 0.5, 2.0) == doctest::Approx(std::sqrt(25.0 / 2.0)));
    Grid g{1.0, 4};
    Field f(g);
    f.values << 3.0, 4.0, 0.0, 0.0;
    CHECK(norm_lp(f, 2.0) == doctest::Approx(2.5));
  }
  SUBCASE("p = 1 is h * sum |f|") {
    Grid g{2.0, 8};
    Field f(g);
    f.values << 1, -2, 3, -4, 5, -6, 7, -8;
    CHECK(norm_lp(f, 1.0) == doctest::Approx(g.dx() * 36.0));
  }
  SUBCASE("p < 1 is a domain error") {
    Grid g{1.0, 4};
    Field f(g, Array::Zero(4));
    CHECK_THROWS_AS(norm_lp(f, 0.5), std::domain_error);
  }
  SUBCASE("monotone in p on probability-normalized fields") {
    std::mt19937_64 rng(5);
    Grid g{1.0, 64};
    Field f = random_smooth_field(g, rng);
    f.values = f.values.abs() + 0.1;
    f.values /= integral(f);  // now |f|_L1 = 1 and f >= 0
    double prev = norm_lp(f, 1.0);
    for (double p : {1.5, 2.0, 3.0, 5.0, 10.0}) {
      const double cur = norm_lp(f, p);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("h1_seminorm") {
  SUBCASE("constant is flat") {
    Grid g{1.0, 10};
    Field f(g, Array::Constant(10, 4.2));
    CHECK(h1_seminorm(f) == doctest::Approx(0.0));
  }
  SUBCASE("linear field on (0,1)") {
    Grid g{1.0, 25};
    Field f(g, g.centers());
    CHECK(h1_seminorm(f) == doctest::Approx(std::sqrt(1.0 - g.dx())));
  }
  SUBCASE("flip invariance") {
    std::mt19937_64 rng(17);
    Grid g{1.0, 40};
    const Field f = random_smooth_field(g, rng);
    Field r(g);
    for (int i = 0; i < 40; ++i) r.values[i] = f.values[39 - i];
    CHECK(h1_seminorm(f) == doctest::Approx(h1_seminorm(r)));
  }
}

TEST_CASE("backward-Euler diffusion solve: residual and positivity") {
  std::mt19937_64 rng(99);
  Grid g{1.0, 48};
  const double h = g.dx();
  Field f = random_smooth_field(g, rng);
  f.values = f.values.abs() + 0.05;
  const double coef = 0.37 * 1e-3;
  Array x;
  solve_diffusion_be(f.values, coef, h, x);
  CHECK((x >= 0.0).all());
  Array lap;
  laplacian_neumann_into(x, h, lap);
  const Array residual = x - coef * lap - f.values;
  CHECK(residual.abs().maxCoeff() <= 1e-12 * f.values.abs().maxCoeff());
  // conservation: BE Neumann diffusion preserves the discrete integral
  CHECK(integral(x, h) == doctest::Approx(integral(f.values, h)).epsilon(1e-13));
}

TEST_CASE("field validation") {
  Grid g{1.0, 8};
  Field f(g, Array::Zero(7));
  CHECK_THROWS_AS(check_field(f), std::invalid_argument);
  Grid bad{1.0, 3};
  CHECK_THROWS_AS(check_grid(bad), std::invalid_argument);
}
