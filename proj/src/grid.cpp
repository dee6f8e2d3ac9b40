#include "crossdiff/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace crossdiff {

Array Grid::centers() const {
  const double h = dx();
  Array x(cells);
  for (int i = 0; i < cells; ++i) x[i] = (i + 0.5) * h;
  return x;
}

void check_grid(const Grid& g) {
  if (!(g.length > 0.0))
    throw std::invalid_argument("grid length must be positive");
  if (g.cells < 4) throw std::invalid_argument("grid needs at least 4 cells");
}

void check_field(const Field& f) {
  check_grid(f.grid);
  if (f.values.size() != f.grid.cells)
    throw std::invalid_argument("field length " + std::to_string(f.values.size()) +
                                " does not match grid with " +
                                std::to_string(f.grid.cells) + " cells");
  if (!f.values.isFinite().all())
    throw std::invalid_argument("field contains non-finite values");
}

void laplacian_neumann_into(const Eigen::Ref<const Array>& f, double h, Array& out) {
  const Eigen::Index n = f.size();
  out.resize(n);
  const double inv_h2 = 1.0 / (h * h);
  // flux F_i across the left face of cell i; F_0 = F_n = 0 (zero flux)
  double flux_left = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double flux_right = (i + 1 < n) ? f[i + 1] - f[i] : 0.0;
    out[i] = (flux_right - flux_left) * inv_h2;
    flux_left = flux_right;
  }
}

void solve_diffusion_be(const Eigen::Ref<const Array>& rhs, double coef, double h,
                        Array& x) {
  const Eigen::Index n = rhs.size();
  x.resize(n);
  if (coef == 0.0) {
    x = rhs;
    return;
  }
  const double r = coef / (h * h);
  // Rows: [1+r, -r | -r, 1+2r, -r | ... | -r, 1+r]
  thread_local Array cp, dp;
  cp.resize(n);
  dp.resize(n);
  double diag = 1.0 + r;
  cp[0] = -r / diag;
  dp[0] = rhs[0] / diag;
  for (Eigen::Index i = 1; i < n; ++i) {
    diag = (i + 1 < n ? 1.0 + 2.0 * r : 1.0 + r) + r * cp[i - 1];
    cp[i] = -r / diag;
    dp[i] = (rhs[i] + r * dp[i - 1]) / diag;
  }
  x[n - 1] = dp[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
}

double norm_lp_array(const Eigen::Ref<const Array>& v, double h, double p) {
  if (!(p >= 1.0)) throw std::domain_error("norm_lp: p must be >= 1");
  if (std::isinf(p)) return v.abs().maxCoeff();
  if (p == 1.0) return h * v.abs().sum();
  if (p == 2.0) return std::sqrt(h * v.square().sum());
  return std::pow(h * v.abs().pow(p).sum(), 1.0 / p);
}

double h1_seminorm_array(const Eigen::Ref<const Array>& v, double h) {
  const Eigen::Index n = v.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d = (v[i + 1] - v[i]) / h;
    s += d * d;
  }
  return std::sqrt(h * s);
}

Field laplacian_neumann(const Field& f) {
  check_field(f);
  Field out(f.grid);
  laplacian_neumann_into(f.values, f.grid.dx(), out.values);
  return out;
}

double integral(const Field& f) { return integral(f.values, f.grid.dx()); }

double norm_lp(const Field& f, double p) {
  check_field(f);
  return norm_lp_array(f.values, f.grid.dx(), p);
}

double h1_seminorm(const Field& f) {
  check_field(f);
  return h1_seminorm_array(f.values, f.grid.dx());
}

}  // namespace crossdiff
