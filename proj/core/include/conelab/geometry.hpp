#pragma once

#include "conelab/grid.hpp"
#include "conelab/tensor.hpp"

namespace conelab {

// Cached differential data of a chart metric.  Christoffel symbols are formed
// algebraically from spectral derivatives of g and are never differentiated;
// curvature uses second derivatives of g plus quadratic Christoffel terms.
// Riemann convention: R_ikjl g^kl = Ric_ij; constant curvature K gives
// R_abcd = K (g_ac g_bd - g_ad g_bc).
struct Geometry {
  GridPtr grid;
  Tensor g;       // lower
  Tensor ginv;    // upper
  Field det;      // det g in chart components
  Field density;  // sqrt(det g) / reference density
  Tensor dg;      // d_a g_bc
  Tensor gamma;   // Gamma^a_bc
  Tensor riem;    // R_abcd
  Tensor ric;     // Ric_ab
  Field scalar;   // R
};

// Throws std::domain_error naming the first node where g is not positive
// definite.
Geometry make_geometry(const GridPtr& grid, const Tensor& g);

Tensor make_round_sphere(const GridPtr& grid, double radius);
// Constant metric [[a, b], [b, c]] on the torus chart.
Tensor make_flat_torus(const GridPtr& grid, double a, double b, double c);

Tensor inverse_metric(const Tensor& g);
Field determinant(const Tensor& g);

Field scalar_curvature(const Geometry& geo);
Tensor ricci(const Geometry& geo);
Tensor riemann(const Geometry& geo);

// Covariant derivative of a covariant tensor; new index in slot 0.
Tensor covariant_derivative(const Geometry& geo, const Tensor& t);

Tensor gradient_form(const Geometry& geo, const Field& u);  // du, lower
Tensor hessian(const Geometry& geo, const Field& u);
Field laplacian(const Geometry& geo, const Field& u);
Tensor divergence(const Geometry& geo, const Tensor& h);    // (delta h)_b, lower
Field double_divergence(const Geometry& geo, const Tensor& h);
Field trace(const Geometry& geo, const Tensor& h);
Tensor rough_laplacian(const Geometry& geo, const Tensor& h);
// V given with an upper index.
Tensor lie_derivative_metric(const Geometry& geo, const Tensor& v_up);
Tensor lower(const Geometry& geo, const Tensor& v_up);
Tensor raise(const Geometry& geo, const Tensor& v_low);
// R_ikjl h^kl
Tensor riemann_action(const Geometry& geo, const Tensor& h);
Tensor lichnerowicz(const Geometry& geo, const Tensor& h);
// d/dt of a scalar along the vector field: V(u)
Field directional(const Geometry& geo, const Tensor& v_up, const Field& u);

// Pointwise <a, b>_g for equal-rank tensors.
Field inner(const Geometry& geo, const Tensor& a, const Tensor& b);

double integrate(const Geometry& geo, const Field& f);
double integrate(const GridPtr& grid, const Field& f, const Tensor& g);

}  // namespace conelab
