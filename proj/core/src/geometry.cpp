#include "conelab/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conelab {

Field determinant(const Tensor& g) { return g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0); }

Tensor inverse_metric(const Tensor& g) {
  const Field det = determinant(g);
  Tensor inv(2, g.nodes());
  inv(0, 0) = g(1, 1) / det;
  inv(1, 1) = g(0, 0) / det;
  inv(0, 1) = -g(0, 1) / det;
  inv(1, 0) = inv(0, 1);
  return inv;
}

Tensor make_round_sphere(const GridPtr& grid, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_round_sphere: radius must be positive");
  if (grid->kind() != GridKind::sphere) throw std::invalid_argument("make_round_sphere: sphere grid required");
  const Field s = grid->theta_nodes().sin();
  const int n = grid->size();
  return sym2(Field::Constant(n, radius * radius), Field::Zero(n), radius * radius * s * s);
}

Tensor make_flat_torus(const GridPtr& grid, double a, double b, double c) {
  if (grid->kind() != GridKind::torus) throw std::invalid_argument("make_flat_torus: torus grid required");
  if (!(a > 0.0 && a * c - b * b > 0.0)) throw std::invalid_argument("make_flat_torus: metric not positive definite");
  const int n = grid->size();
  return sym2(Field::Constant(n, a), Field::Constant(n, b), Field::Constant(n, c));
}

Geometry make_geometry(const GridPtr& grid, const Tensor& g) {
  if (g.rank != 2 || g.nodes() != grid->size()) throw std::invalid_argument("make_geometry: metric does not match grid");
  Geometry geo;
  geo.grid = grid;
  geo.g = g;
  symmetrize(geo.g);
  geo.det = determinant(geo.g);
  for (int p = 0; p < grid->size(); ++p) {
    if (!(geo.g(0, 0)(p) > 0.0 && geo.det(p) > 0.0)) {
      std::ostringstream os;
      os << "metric not positive definite at node " << p << " (theta=" << grid->theta_nodes()(p)
         << ", phi=" << grid->phi_nodes()(p) << ")";
      throw std::domain_error(os.str());
    }
  }
  geo.ginv = inverse_metric(geo.g);
  geo.density = geo.det.sqrt() / grid->ref_density();

  geo.dg = partial(*grid, geo.g);
  const int n = grid->size();

  // Gamma_{c,ab} = (d_a g_bc + d_b g_ac - d_c g_ab) / 2, then raise.
  Tensor first(3, n);
  for (int cc = 0; cc < 2; ++cc)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        first(cc, a, b) = 0.5 * (geo.dg(a, b, cc) + geo.dg(b, a, cc) - geo.dg(cc, a, b));
  geo.gamma = Tensor(3, n);
  for (int d = 0; d < 2; ++d)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        geo.gamma(d, a, b) = geo.ginv(d, 0) * first(0, a, b) + geo.ginv(d, 1) * first(1, a, b);

  const Tensor ddg = partial(*grid, geo.dg);
  geo.riem = Tensor(4, n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          Field r = 0.5 * (ddg(b, c, a, d) + ddg(a, d, b, c) - ddg(a, c, b, d) - ddg(b, d, a, c));
          for (int e = 0; e < 2; ++e)
            for (int f = 0; f < 2; ++f)
              r += geo.g(e, f) *
                   (geo.gamma(e, b, c) * geo.gamma(f, a, d) - geo.gamma(e, b, d) * geo.gamma(f, a, c));
          geo.riem(a, b, c, d) = r;
        }
  geo.ric = contract(geo.riem, 1, 3, geo.ginv);
  symmetrize(geo.ric);
  geo.scalar = contract(geo.ric, 0, 1, geo.ginv).c[0];
  return geo;
}

Field scalar_curvature(const Geometry& geo) { return geo.scalar; }
Tensor ricci(const Geometry& geo) { return geo.ric; }
Tensor riemann(const Geometry& geo) { return geo.riem; }

Tensor covariant_derivative(const Geometry& geo, const Tensor& t) {
  Tensor out = partial(*geo.grid, t);
  const int stride = 1 << t.rank;
  for (int a = 0; a < 2; ++a)
    for (int flat = 0; flat < t.ncomp(); ++flat) {
      auto digits = comp_digits(flat, t.rank);
      Field& o = out.c[a * stride + flat];
      for (int slot = 0; slot < t.rank; ++slot) {
        auto swapped = digits;
        for (int d = 0; d < 2; ++d) {
          swapped[slot] = d;
          o -= geo.gamma(d, a, digits[slot]) * t.c[comp_index(swapped)];
        }
      }
    }
  return out;
}

Tensor gradient_form(const Geometry& geo, const Field& u) {
  return partial(*geo.grid, scalar_tensor(u));
}

Tensor hessian(const Geometry& geo, const Field& u) {
  Tensor h = covariant_derivative(geo, gradient_form(geo, u));
  symmetrize(h);
  return h;
}

Field trace(const Geometry& geo, const Tensor& h) { return contract(h, 0, 1, geo.ginv).c[0]; }

Field laplacian(const Geometry& geo, const Field& u) { return trace(geo, hessian(geo, u)); }

Tensor divergence(const Geometry& geo, const Tensor& h) {
  return contract(covariant_derivative(geo, h), 0, 1, geo.ginv);
}

Field double_divergence(const Geometry& geo, const Tensor& h) {
  return contract(covariant_derivative(geo, divergence(geo, h)), 0, 1, geo.ginv).c[0];
}

Tensor rough_laplacian(const Geometry& geo, const Tensor& h) {
  const Tensor dd = covariant_derivative(geo, covariant_derivative(geo, h));
  return contract(dd, 0, 1, geo.ginv);
}

Tensor lower(const Geometry& geo, const Tensor& v_up) {
  Tensor out(1, v_up.nodes());
  for (int a = 0; a < 2; ++a) out(a) = geo.g(a, 0) * v_up(0) + geo.g(a, 1) * v_up(1);
  return out;
}

Tensor raise(const Geometry& geo, const Tensor& v_low) {
  Tensor out(1, v_low.nodes());
  for (int a = 0; a < 2; ++a) out(a) = geo.ginv(a, 0) * v_low(0) + geo.ginv(a, 1) * v_low(1);
  return out;
}

Tensor lie_derivative_metric(const Geometry& geo, const Tensor& v_up) {
  const Tensor dv = covariant_derivative(geo, lower(geo, v_up));
  Tensor out(2, v_up.nodes());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out(a, b) = dv(a, b) + dv(b, a);
  return out;
}

Tensor riemann_action(const Geometry& geo, const Tensor& h) {
  Tensor hup(2, h.nodes());
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      Field s = Field::Zero(h.nodes());
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) s += geo.ginv(k, p) * geo.ginv(l, q) * h(p, q);
      hup(k, l) = s;
    }
  Tensor out(2, h.nodes());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(i, j) += geo.riem(i, k, j, l) * hup(k, l);
  return out;
}

Tensor lichnerowicz(const Geometry& geo, const Tensor& h) {
  Tensor out = rough_laplacian(geo, h);
  out += 2.0 * riemann_action(geo, h);
  symmetrize(out);
  return out;
}

Field directional(const Geometry& geo, const Tensor& v_up, const Field& u) {
  const Tensor du = gradient_form(geo, u);
  return v_up(0) * du(0) + v_up(1) * du(1);
}

Field inner(const Geometry& geo, const Tensor& a, const Tensor& b) { return full_inner(a, b, geo.ginv); }

double integrate(const Geometry& geo, const Field& f) {
  if (f.size() != geo.grid->size()) throw std::invalid_argument("integrate: grid mismatch");
  return (f * geo.density * geo.grid->quad_weights()).sum();
}

double integrate(const GridPtr& grid, const Field& f, const Tensor& g) {
  if (f.size() != grid->size() || g.nodes() != grid->size()) throw std::invalid_argument("integrate: grid mismatch");
  const Field dens = determinant(g).sqrt() / grid->ref_density();
  return (f * dens * grid->quad_weights()).sum();
}

}  // namespace conelab
