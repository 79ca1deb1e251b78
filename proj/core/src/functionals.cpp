#include "conelab/functionals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace conelab {

TangentPair& TangentPair::operator+=(const TangentPair& o) {
  h += o.h;
  v += o.v;
  return *this;
}

TangentPair& TangentPair::operator-=(const TangentPair& o) {
  h -= o.h;
  v -= o.v;
  return *this;
}

TangentPair& TangentPair::operator*=(double s) {
  h *= s;
  v *= s;
  return *this;
}

TangentPair operator+(TangentPair a, const TangentPair& b) { return a += b; }
TangentPair operator-(TangentPair a, const TangentPair& b) { return a -= b; }
TangentPair operator*(double s, TangentPair a) { return a *= s; }

TangentPair zero_tangent(int nodes) { return {Tensor(2, nodes), Field::Zero(nodes)}; }

double unit_sphere_volume(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

BackgroundData BackgroundData::round(const GridPtr& grid, double b_inf, int n) {
  if (!(b_inf > 0.0)) throw std::invalid_argument("BackgroundData: b_inf must be positive");
  if (n != 3) throw std::invalid_argument("BackgroundData: the S^2 grid realizes n = 3 only");
  BackgroundData bg;
  bg.grid = grid;
  bg.n = n;
  bg.b_inf = b_inf;
  bg.g0 = make_round_sphere(grid, 1.0);
  bg.gbar = (1.0 / (b_inf * b_inf)) * bg.g0;
  bg.base = make_geometry(grid, bg.gbar);
  bg.level = integrate(bg.base, Field::Constant(grid->size(), b_inf));
  return bg;
}

bool BackgroundData::consistent() const { return std::abs(level - volume()) <= 1e-10 * volume(); }

WeightedPair BackgroundData::base_pair() const { return {gbar, Field::Constant(grid->size(), b_inf)}; }

double eval_A(const Geometry& geo, const Field& w) { return integrate(geo, w.cube()); }
double eval_B(const Geometry& geo, const Field& w) { return integrate(geo, geo.scalar * w); }
double eval_A1(const Geometry& geo, const Field& w) { return integrate(geo, w); }

double eval_R(const Geometry& geo, const Field& w, int n) {
  if (n <= 2) throw std::invalid_argument("eval_R: n must be at least 3");
  return (eval_A(geo, w) - eval_B(geo, w) / (n - 2)) / (2 - n);
}

double eval_A(const GridPtr& grid, const WeightedPair& p) { return eval_A(make_geometry(grid, p.g), p.w); }
double eval_B(const GridPtr& grid, const WeightedPair& p) { return eval_B(make_geometry(grid, p.g), p.w); }
double eval_A1(const GridPtr& grid, const WeightedPair& p) { return integrate(grid, p.w, p.g); }
double eval_R(const GridPtr& grid, const WeightedPair& p, int n) { return eval_R(make_geometry(grid, p.g), p.w, n); }

Tensor psi_map(const Tensor& g, const Tensor& J, const Tensor& base) {
  const Tensor gi = inverse_metric(g);
  const int n = g.nodes();
  // M = g^{-1} J g^{-1}, then gbar M gbar
  Tensor m(2, n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Field s = Field::Zero(n);
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) s += gi(a, c) * J(c, d) * gi(d, b);
      m(a, b) = s;
    }
  Tensor out(2, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Field s = Field::Zero(n);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += base(i, a) * m(a, b) * base(b, j);
      out(i, j) = s;
    }
  return out;
}

double l2_inner(const BackgroundData& bg, const TangentPair& x, const TangentPair& y) {
  return bg.b_inf * integrate(bg.base, inner(bg.base, x.h, y.h) + x.v * y.v);
}

double l2_norm(const BackgroundData& bg, const TangentPair& x) { return std::sqrt(l2_inner(bg, x, x)); }

double min_relative_eigenvalue(const Tensor& g, const Tensor& gbar) {
  // eigenvalues of gbar^{-1} g solve det(g - lambda gbar) = 0
  const Field a = determinant(gbar);
  const Field b = -(g(0, 0) * gbar(1, 1) + g(1, 1) * gbar(0, 0) - 2.0 * g(0, 1) * gbar(0, 1));
  const Field c = determinant(g);
  const Field disc = (b.square() - 4.0 * a * c).max(0.0);
  const Field lo = (-b - disc.sqrt()) / (2.0 * a);
  return lo.minCoeff();
}

bool in_guard(const BackgroundData& bg, const WeightedPair& p) {
  if (p.g.nodes() != bg.grid->size() || p.w.size() != bg.grid->size()) return false;
  if (!(min_relative_eigenvalue(p.g, bg.gbar) > 0.5)) return false;
  return (p.w / bg.b_inf - 1.0).abs().maxCoeff() < 0.5;
}

void require_guard(const BackgroundData& bg, const WeightedPair& p, const char* who) {
  if (p.w.size() == bg.grid->size() && (p.w <= 0.0).any())
    throw std::domain_error(std::string(who) + ": weight must be positive");
  if (!in_guard(bg, p)) {
    std::ostringstream os;
    os << who << ": pair outside the neighborhood guard (min rel. eigenvalue "
       << min_relative_eigenvalue(p.g, bg.gbar) << ", max |w/b_inf - 1| "
       << (p.w / bg.b_inf - 1.0).abs().maxCoeff() << ")";
    throw std::domain_error(os.str());
  }
}

namespace {
Field nu_factor(const Geometry& geo, const Field& w, const BackgroundData& bg) {
  return w * (geo.det / bg.base.det).sqrt() / bg.b_inf;
}
}  // namespace

TangentPair grad_R(const WeightedPair& p, const BackgroundData& bg) {
  require_guard(bg, p, "grad_R");
  const int n = bg.n;
  const Geometry geo = make_geometry(bg.grid, p.g);
  const Field nu = nu_factor(geo, p.w, bg);
  const Field w2 = p.w.square();
  const Field phi1 = 3.0 * w2 - geo.scalar / (n - 2);
  const Tensor hw = hessian(geo, p.w);
  const Field lapw = trace(geo, hw);

  Tensor J = (1.0 / (n - 2)) * geo.ric;
  J -= w2 * geo.g;
  Tensor J2 = (lapw / p.w) * geo.g;
  J2 -= p.w.inverse() * hw;
  J += (1.0 / (n - 2)) * J2;

  Tensor h = (0.5 * phi1) * psi_map(geo.g, geo.g, bg.gbar);
  h += psi_map(geo.g, J, bg.gbar);
  h.mul(nu);
  h *= 1.0 / (2 - n);
  symmetrize(h);
  return {h, phi1 * nu / (2 - n)};
}

TangentPair grad_A1(const WeightedPair& p, const BackgroundData& bg) {
  require_guard(bg, p, "grad_A1");
  const Geometry geo = make_geometry(bg.grid, p.g);
  const Field nu = nu_factor(geo, p.w, bg);
  Tensor h = (0.5 * nu) * psi_map(geo.g, geo.g, bg.gbar);
  symmetrize(h);
  return {h, nu};
}

TangentPair project_out(const BackgroundData& bg, const TangentPair& grad, const TangentPair& ga) {
  const double den = l2_inner(bg, ga, ga);
  if (!(den > 0.0)) throw std::domain_error("project_gradient: grad A1 vanishes");
  return grad - (l2_inner(bg, grad, ga) / den) * ga;
}

TangentPair project_gradient(const WeightedPair& p, const BackgroundData& bg) {
  return project_out(bg, grad_R(p, bg), grad_A1(p, bg));
}

WeightedPair exp_chart(const TangentPair& x, const BackgroundData& bg) {
  WeightedPair out;
  out.g = bg.gbar + x.h;
  const Field w = bg.b_inf * x.v.exp();
  const Geometry geo = make_geometry(bg.grid, out.g);
  out.w = (bg.level / integrate(geo, w)) * w;
  return out;
}

double first_variation_A(const GridPtr& grid, const WeightedPair& p, const TangentPair& x) {
  const Geometry geo = make_geometry(grid, p.g);
  const Field w2 = p.w.square();
  return integrate(geo, (w2 * (0.5 * trace(geo, x.h) + x.v) + 2.0 * w2 * x.v) * p.w);
}

double first_variation_B(const GridPtr& grid, const WeightedPair& p, const TangentPair& x) {
  const Geometry geo = make_geometry(grid, p.g);
  const Tensor hw = hessian(geo, p.w);
  const Field lapw = trace(geo, hw);
  const Field trh = trace(geo, x.h);
  const Field integrand = -inner(geo, geo.ric, x.h) + inner(geo, x.h, hw) / p.w - trh * lapw / p.w +
                          geo.scalar * (0.5 * trh + x.v);
  return integrate(geo, integrand * p.w);
}

double first_variation_A1(const GridPtr& grid, const WeightedPair& p, const TangentPair& x) {
  return tangency_residual(grid, p, x);
}

double tangency_residual(const GridPtr& grid, const WeightedPair& p, const TangentPair& x) {
  const Geometry geo = make_geometry(grid, p.g);
  return integrate(geo, (0.5 * trace(geo, x.h) + x.v) * p.w);
}

WeightedPair move(const WeightedPair& p, const TangentPair& x, double t) {
  return {p.g + t * x.h, p.w * (t * x.v).exp()};
}

}  // namespace conelab
