#include <doctest.h>

#include <conelab/fd.hpp>
#include <conelab/functionals.hpp>
#include <conelab/harmonics.hpp>

#include <cmath>
#include <numbers>

using namespace conelab;

namespace {
constexpr double kPi = std::numbers::pi;
const GridPtr& sphere() {
  static const GridPtr g = Grid::sphere(32, 64);
  return g;
}
}  // namespace

TEST_SUITE("functionals") {
  TEST_CASE("base pair values at b_inf = 1") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const WeightedPair p = bg.base_pair();
    CHECK(eval_A(sphere(), p) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(eval_A1(sphere(), p) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    CHECK(eval_B(sphere(), p) == doctest::Approx(8.0 * kPi).epsilon(1e-10));
    CHECK(eval_R(sphere(), p, 3) == doctest::Approx(4.0 * kPi).epsilon(1e-10));
    CHECK(bg.consistent());
  }

  TEST_CASE("scaled pairs follow the closed form") {
    // (c g0, k): A = k^3 c 4pi, B = (2/c) k c 4pi, A_1 = k c 4pi
    for (const auto& [c, k] : {std::pair{2.25, 1.0}, {0.5, 1.3}}) {
      const WeightedPair p{c * make_round_sphere(sphere(), 1.0), Field::Constant(sphere()->size(), k)};
      CHECK(eval_A(sphere(), p) == doctest::Approx(k * k * k * c * 4.0 * kPi).epsilon(1e-12));
      CHECK(eval_B(sphere(), p) == doctest::Approx(8.0 * kPi * k).epsilon(1e-9));
      CHECK(eval_A1(sphere(), p) == doctest::Approx(k * c * 4.0 * kPi).epsilon(1e-12));
    }
  }

  TEST_CASE("the l2 norm of (g0, 0) is 2 Vol") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const TangentPair x{bg.g0, Field::Zero(sphere()->size())};
    CHECK(l2_inner(bg, x, x) == doctest::Approx(2.0 * 4.0 * kPi).epsilon(1e-12));
  }

  TEST_CASE("Psi map") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    FieldSampler fs(sphere(), 9);
    const Tensor J = fs.sym_tensor();
    CHECK((psi_map(bg.gbar, J, bg.gbar) - J).max_abs() < 1e-12 * J.max_abs());
    CHECK((psi_map(3.0 * bg.gbar, J, bg.gbar) - (1.0 / 9.0) * J).max_abs() < 1e-12 * J.max_abs());
  }

  TEST_CASE("gradients at the base pair") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const WeightedPair p = bg.base_pair();
    const TangentPair ga = grad_A1(p, bg);
    CHECK((ga.h - 0.5 * bg.gbar).max_abs() < 1e-12);
    CHECK((ga.v - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(l2_norm(bg, project_gradient(p, bg)) < 1e-8 * l2_norm(bg, ga));
    // a gradient parallel to grad A_1 projects to zero
    CHECK(l2_norm(bg, project_out(bg, 2.5 * ga, ga)) < 1e-12 * l2_norm(bg, ga));
  }

  TEST_CASE("conformal directions: gradient of R matches finite differences") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    FieldSampler fs(sphere(), 13);
    const WeightedPair p = move(bg.base_pair(), TangentPair{Field(0.05 * fs.scalar()) * bg.gbar, Field::Zero(sphere()->size())}, 1.0);
    const TangentPair g = grad_R(p, bg);
    for (int k = 0; k < 20; ++k) {
      const TangentPair y{fs.sym_tensor(), fs.scalar()};
      const double fd = fd_first([&](double t) { return eval_R(sphere(), move(p, y, t), 3); });
      CHECK(std::abs(l2_inner(bg, g, y) - fd) <= 1e-6 * std::abs(fd));
    }
  }

  TEST_CASE("exp chart") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const WeightedPair e0 = exp_chart(zero_tangent(sphere()->size()), bg);
    CHECK((e0.g - bg.gbar).max_abs() < 1e-14);
    CHECK((e0.w - bg.b_inf).abs().maxCoeff() < 1e-14);
    FieldSampler fs(sphere(), 17);
    const TangentPair x{0.05 * fs.sym_tensor(), 0.05 * fs.scalar()};
    CHECK(eval_A1(sphere(), exp_chart(x, bg)) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  }

  TEST_CASE("tangency of (g0, -1) and the guard") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const TangentPair x{bg.g0, Field::Constant(sphere()->size(), -1.0)};
    CHECK(std::abs(tangency_residual(sphere(), bg.base_pair(), x)) < 1e-12);
    CHECK(std::abs(l2_inner(bg, grad_A1(bg.base_pair(), bg), x)) < 1e-12);
    const WeightedPair far{bg.gbar, Field::Constant(sphere()->size(), 2.0)};
    CHECK_FALSE(in_guard(bg, far));
    CHECK_THROWS(grad_A1(far, bg));
  }
}
