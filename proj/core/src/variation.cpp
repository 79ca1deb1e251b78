#include "conelab/variation.hpp"

#include "conelab/fd.hpp"

#include <cmath>
#include <stdexcept>

namespace conelab {

namespace {
Tensor raise_both(const Geometry& geo, const Tensor& h) {
  const int n = h.nodes();
  Tensor up(2, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Field s = Field::Zero(n);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s += geo.ginv(i, k) * geo.ginv(j, l) * h(k, l);
      up(i, j) = s;
    }
  return up;
}

// A_i^k B_kj with the middle index raised: A_ik g^kl B_lj
Tensor mixed_product(const Geometry& geo, const Tensor& a, const Tensor& b) {
  const int n = a.nodes();
  Tensor out(2, n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Field s = Field::Zero(n);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) s += a(i, k) * geo.ginv(k, l) * b(l, j);
      out(i, j) = s;
    }
  return out;
}
}  // namespace

Tensor dmetric_inverse(const Geometry& geo, const Tensor& h) { return -1.0 * raise_both(geo, h); }

Field dnorm_gradient(const Geometry& geo, const Tensor& h, const Field& u, const Field& v) {
  const Tensor du = raise(geo, gradient_form(geo, u));
  const Tensor dv = gradient_form(geo, v);
  Field hu = Field::Zero(u.size());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) hu += h(a, b) * du(a) * du(b);
  return -hu + 2.0 * (du(0) * dv(0) + du(1) * dv(1));
}

Field dvolume_form(const Geometry& geo, const Tensor& h) { return 0.5 * trace(geo, h); }

Field dscalar_curvature(const Geometry& geo, const Tensor& h) {
  return -inner(geo, geo.ric, h) + double_divergence(geo, h) - laplacian(geo, trace(geo, h));
}

Tensor dricci(const Geometry& geo, const Tensor& h) {
  const Tensor ddh = covariant_derivative(geo, divergence(geo, h));
  const Tensor rh = mixed_product(geo, geo.ric, h);
  const Tensor lap = rough_laplacian(geo, h);
  const Tensor htr = hessian(geo, trace(geo, h));
  Tensor out(2, h.nodes());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out(i, j) = 0.5 * (ddh(i, j) + ddh(j, i) + rh(i, j) + rh(j, i) - lap(i, j) - htr(i, j));
  out -= riemann_action(geo, h);
  symmetrize(out);
  return out;
}

Tensor dhessian(const Geometry& geo, const Tensor& h, const Field& u, const Field& v) {
  const Tensor dh = covariant_derivative(geo, h);  // (nabla_a h)_bc
  const Tensor du = raise(geo, gradient_form(geo, u));
  Tensor out = hessian(geo, v);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out(i, j) -= 0.5 * (dh(i, j, k) + dh(j, i, k) - dh(k, i, j)) * du(k);
  symmetrize(out);
  return out;
}

PathJet path_jet(const PairPath& path, const BackgroundData& bg) {
  PathJet jet;
  jet.h = fd_first_value<Tensor>([&](double t) { return path(t).g; });
  jet.hp = fd_second_value<Tensor>([&](double t) { return path(t).g; });
  auto s = [&](double t) -> Field { return (path(t).w / bg.b_inf).log(); };
  jet.v = fd_first_value<Field>(s);
  jet.vp = 0.5 * fd_second_value<Field>(s);
  return jet;
}

ConstraintResidual constraint_derivatives(const PairPath& path, const BackgroundData& bg) {
  ConstraintResidual res;
  const double vol = bg.level;
  for (double t : {-1e-3, -1e-4, 0.0, 1e-4, 1e-3}) {
    const WeightedPair p = path(t);
    const double drift = std::abs(eval_A1(bg.grid, p) - vol) / vol;
    res.path_drift = std::max(res.path_drift, drift);
    if (drift > 1e-10) throw std::domain_error("constraint_derivatives: path leaves A_1");
  }
  const PathJet jet = path_jet(path, bg);
  const Geometry& geo = bg.base;
  const Field psi = 0.5 * trace(geo, jet.h) + jet.v;
  res.first = integrate(geo, psi);
  res.second = integrate(geo, psi.square() + 0.5 * trace(geo, jet.hp) - 0.5 * inner(geo, jet.h, jet.h) +
                                  2.0 * jet.vp);
  return res;
}

}  // namespace conelab
