/* Uniform cell-centered 1D mesh on (0, L) with zero-flux boundaries:
 * 3-point Neumann Laplacian in flux form, midpoint quadrature, discrete
 * Lp norms and the forward-difference H1 seminorm. */
#pragma once

#include <Eigen/Dense>

namespace crossdiff {

using Array = Eigen::ArrayXd;

struct Grid {
  double length = 1.0;  // L > 0
  int cells = 128;      // n >= 4

  double dx() const { return length / cells; }
  double measure() const { return length; }
  Array centers() const;
  bool operator==(const Grid& o) const {
    return length == o.length && cells == o.cells;
  }
};

/// Throws std::invalid_argument unless L > 0 and n >= 4.
void check_grid(const Grid& g);

struct Field {
  Grid grid;
  Array values;

  Field() = default;
  Field(const Grid& g, Array v) : grid(g), values(std::move(v)) {}
  explicit Field(const Grid& g) : grid(g), values(Array::Zero(g.cells)) {}
};

/// Throws if the value count does not match the grid or a value is non-finite.
void check_field(const Field& f);

// -- free functions on raw arrays (expression-friendly hot paths) -----------

/// 3-point Neumann Laplacian with mirror ghost cells, written in flux form so
/// the discrete integral telescopes.
void laplacian_neumann_into(const Eigen::Ref<const Array>& f, double h, Array& out);

/// Solves (I - coef * Lap_h) x = rhs with the Neumann Laplacian (Thomas
/// algorithm). coef >= 0; the matrix is an M-matrix, so nonnegative rhs gives
/// nonnegative x.
void solve_diffusion_be(const Eigen::Ref<const Array>& rhs, double coef, double h,
                        Array& x);

template <typename Derived>
double integral(const Eigen::ArrayBase<Derived>& v, double h) {
  return h * v.sum();
}

double norm_lp_array(const Eigen::Ref<const Array>& v, double h, double p);
double h1_seminorm_array(const Eigen::Ref<const Array>& v, double h);

// -- Field-level wrappers ----------------------------------------------------

Field laplacian_neumann(const Field& f);
double integral(const Field& f);
/// (h sum |f_i|^p)^(1/p); max |f_i| for p = infinity. p < 1 is a domain error.
double norm_lp(const Field& f, double p);
double h1_seminorm(const Field& f);

}  // namespace crossdiff
