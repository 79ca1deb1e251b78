#include <doctest.h>

#include <conelab/fd.hpp>
#include <conelab/harmonics.hpp>
#include <conelab/linearization.hpp>
#include <conelab/variation.hpp>

#include <cmath>
#include <numbers>

using namespace conelab;

namespace {
constexpr double kPi = std::numbers::pi;
const GridPtr& sphere() {
  static const GridPtr g = Grid::sphere(32, 64);
  return g;
}

TangentPair small_pair(FieldSampler& fs) {
  const Tensor h = fs.sym_tensor();
  const Field v = fs.scalar();
  return {(0.1 / h.max_abs()) * h, (0.1 / v.abs().maxCoeff()) * v};
}

// L_V T for a covariant 2-tensor.  Derivatives only hit T and the covector
// V^c T_cb, since the chart components of V are not smooth at the poles.
Tensor lie_derivative(const Grid& grid, const Tensor& t, const Tensor& v_up) {
  const Tensor dt = partial(grid, t);  // d_c T_ab
  Tensor w(1, t.nodes());              // V^c T_cb
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) w(b) += v_up(c) * t(c, b);
  const Tensor dw = partial(grid, w);  // d_a W_b
  Tensor out(2, t.nodes());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      out(a, b) = dw(a, b) + dw(b, a);
      for (int c = 0; c < 2; ++c) out(a, b) += v_up(c) * (dt(c, a, b) - dt(a, c, b) - dt(b, a, c));
    }
  return out;
}
}  // namespace

TEST_SUITE("variation") {
  TEST_CASE("scaling variations") {
    const Tensor g0 = make_round_sphere(sphere(), 1.0);
    const Geometry round = make_geometry(sphere(), g0);
    CHECK((dvolume_form(round, 2.0 * g0) - 2.0).abs().maxCoeff() < 1e-12);
    CHECK((dscalar_curvature(round, g0) + 2.0).abs().maxCoeff() < 1e-8);
  }

  TEST_CASE("variation of Ricci along a Lie derivative is the Lie derivative of Ricci") {
    FieldSampler fs(sphere(), 21);
    const Tensor dh = fs.sym_tensor();
    const Geometry geo = make_geometry(sphere(), make_round_sphere(sphere(), 1.0) + (0.05 / dh.max_abs()) * dh);
    const Tensor v = fs.vector_up();
    const Tensor lhs = dricci(geo, lie_derivative_metric(geo, v));
    const Tensor rhs = lie_derivative(*sphere(), geo.ric, v);
    CHECK((lhs - rhs).max_abs() < 1e-7 * rhs.max_abs());
  }

  TEST_CASE("constraint derivatives along exp_chart and constant paths") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    FieldSampler fs(sphere(), 23);
    const TangentPair x = small_pair(fs);
    const ConstraintResidual r = constraint_derivatives([&](double t) { return exp_chart(t * x, bg); }, bg);
    CHECK(r.first <= 1e-7);
    CHECK(r.second <= 1e-7);
    const ConstraintResidual z = constraint_derivatives([&](double) { return bg.base_pair(); }, bg);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);
  }

  TEST_CASE("second variations of A and B on the scaling path") {
    // g_t = (1 + c t) g0, w_t = e^{-c t}: A = 4 pi e^{-3ct}(1 + ct), B = 8 pi e^{-ct}
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const double c = 0.3;
    const TangentPair x{c * bg.g0, Field::Constant(sphere()->size(), -c)};
    const TangentPair xp = zero_tangent(sphere()->size());
    CHECK(second_variation_A(bg, x, xp) == doctest::Approx(12.0 * kPi * c * c).epsilon(1e-10));
    CHECK(second_variation_B(bg, x, xp) == doctest::Approx(8.0 * kPi * c * c).epsilon(1e-8));
    const TangentPair z = zero_tangent(sphere()->size());
    CHECK(std::abs(second_variation_A(bg, z, z)) < 1e-14);
    CHECK(std::abs(second_variation_B(bg, z, z)) < 1e-14);
  }

  TEST_CASE("second variation along a random path matches finite differences") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.3);
    FieldSampler fs(sphere(), 29);
    const TangentPair x = small_pair(fs);
    const TangentPair xp = small_pair(fs);
    const PairPath path = second_order_path(bg, x, xp);
    const double fa = fd_second([&](double t) { return eval_A(sphere(), path(t)); });
    const double fb = fd_second([&](double t) { return eval_B(sphere(), path(t)); });
    CHECK(std::abs(second_variation_A(bg, x, xp) - fa) <= 1e-5 * std::abs(fa));
    CHECK(std::abs(second_variation_B(bg, x, xp) - fb) <= 1e-5 * std::abs(fb));
  }

  TEST_CASE("v-only second variation is 6 b^3 int v^2") {
    const double b = 1.3;
    const BackgroundData bg = BackgroundData::round(sphere(), b);
    const Field v = real_harmonic(*sphere(), 1, 0);  // int v^2 dmu_gbar = b^-2
    const Tensor h0(2, sphere()->size());
    CHECK(sv_transverse_traceless(bg, h0, v) == doctest::Approx(6.0 * b).epsilon(1e-10));
    CHECK(sv_conformal(bg, Field::Zero(sphere()->size()), v) == doctest::Approx(6.0 * b).epsilon(1e-10));
  }

  TEST_CASE("conformal block") {
    const double b = 1.3;
    const BackgroundData bg = BackgroundData::round(sphere(), b);
    const ConformalBlock cb(bg);
    CHECK(cb.symbol_determinant() == -1.0);
    // n = 3 on constants: (2 b^2 c2, 2 b^2 c1 + 6 b^2 c2)
    const auto [p, q] = cb.constant_image(1.0, 1.0);
    CHECK(p == doctest::Approx(2.0 * b * b).epsilon(1e-14));
    CHECK(q == doctest::Approx(8.0 * b * b).epsilon(1e-14));
  }

  TEST_CASE("transverse traceless formula rejects non-tangent input") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    CHECK_THROWS(sv_transverse_traceless(bg, Tensor(2, sphere()->size()), Field::Ones(sphere()->size())));
  }
}
