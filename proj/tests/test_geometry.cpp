#include <doctest.h>

#include <conelab/geometry.hpp>
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
double max_abs(const Field& f) { return f.abs().maxCoeff(); }
}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("round sphere curvature and area scale with the radius") {
    for (double rho : {1.0, 0.7, 2.5}) {
      const Geometry geo = make_geometry(sphere(), make_round_sphere(sphere(), rho));
      CHECK(max_abs(geo.scalar - 2.0 / (rho * rho)) < 1e-8);
      CHECK(integrate(geo, Field::Ones(sphere()->size())) == doctest::Approx(4.0 * kPi * rho * rho).epsilon(1e-13));
    }
  }

  TEST_CASE("unit sphere has Ric = g") {
    const Geometry geo = make_geometry(sphere(), make_round_sphere(sphere(), 1.0));
    CHECK((geo.ric - geo.g).max_abs() < 1e-8);
  }

  TEST_CASE("constant torus metrics are flat") {
    const auto t = Grid::torus(16);
    const Geometry geo = make_geometry(t, make_flat_torus(t, 1.7, 0.3, 0.9));
    CHECK(geo.riem.max_abs() < 1e-10);
    CHECK(geo.ric.max_abs() < 1e-10);
    CHECK(max_abs(geo.scalar) < 1e-10);
  }

  TEST_CASE("conformal change of scalar curvature in dimension 2") {
    const Tensor g0 = make_round_sphere(sphere(), 1.0);
    const Geometry round = make_geometry(sphere(), g0);
    const Field u = 0.1 * real_harmonic(*sphere(), 2, 1) + 0.05 * real_harmonic(*sphere(), 1, 0);
    const Geometry conf = make_geometry(sphere(), Field((2.0 * u).exp()) * g0);
    // e^{-2u} (R_0 - 2 Lap_0 u) with Lap_0 from the eigenvalues of the harmonics
    const Field lap = -6.0 * 0.1 * real_harmonic(*sphere(), 2, 1) - 2.0 * 0.05 * real_harmonic(*sphere(), 1, 0);
    CHECK(max_abs(conf.scalar - Field((-2.0 * u).exp() * (2.0 - 2.0 * lap))) < 1e-8);
    CHECK(max_abs(laplacian(round, u) - lap) < 1e-9);
  }

  TEST_CASE("Hessian of a constant and divergence of a parallel tensor vanish") {
    const Tensor g0 = make_round_sphere(sphere(), 1.0);
    const Geometry round = make_geometry(sphere(), g0);
    CHECK(hessian(round, Field::Constant(sphere()->size(), 3.0)).max_abs() < 1e-11);
    CHECK(divergence(round, 2.5 * g0).max_abs() < 1e-9);
  }

  TEST_CASE("spherical harmonics are Laplace eigenfunctions") {
    const Geometry round = make_geometry(sphere(), make_round_sphere(sphere(), 1.0));
    for (const auto& [l, m] : harmonic_indices(1, 5)) {
      const Field y = real_harmonic(*sphere(), l, m);
      CHECK(max_abs(laplacian(round, y) + double(l * (l + 1)) * y) < 1e-8 * l * (l + 1));
    }
  }

  TEST_CASE("Lichnerowicz operator") {
    const Tensor g0 = make_round_sphere(sphere(), 1.0);
    const Geometry round = make_geometry(sphere(), g0);
    CHECK((lichnerowicz(round, g0) - 2.0 * g0).max_abs() < 1e-8);

    const auto t = Grid::torus(16);
    const Tensor gt = make_flat_torus(t, 1.0, 0.2, 1.5);
    const Geometry flat = make_geometry(t, gt);
    CHECK(lichnerowicz(flat, sym2(Field::Constant(t->size(), 0.3), Field::Constant(t->size(), -0.1),
                                  Field::Constant(t->size(), 0.7)))
              .max_abs() < 1e-10);
  }

  TEST_CASE("Riemann contracts to Ricci on a perturbed metric") {
    FieldSampler fs(sphere(), 3);
    const Geometry geo = make_geometry(sphere(), make_round_sphere(sphere(), 1.0) + 0.05 * fs.sym_tensor());
    CHECK((contract(geo.riem, 1, 3, geo.ginv) - geo.ric).max_abs() < 1e-10);
  }

  TEST_CASE("integration by parts") {
    FieldSampler fs(sphere(), 5);
    const Geometry geo = make_geometry(sphere(), make_round_sphere(sphere(), 1.0) + 0.05 * fs.sym_tensor());
    const Tensor h = fs.sym_tensor();
    const Field u = fs.scalar(), v = fs.scalar();
    const double a = integrate(geo, inner(geo, h, hessian(geo, u)));
    CHECK(a == doctest::Approx(integrate(geo, u * double_divergence(geo, h))).epsilon(1e-9));
    CHECK(integrate(geo, u * laplacian(geo, v)) == doctest::Approx(integrate(geo, v * laplacian(geo, u))).epsilon(1e-9));
  }

  TEST_CASE("non positive definite metrics are rejected") {
    const Tensor g0 = make_round_sphere(sphere(), 1.0);
    CHECK_THROWS_AS(make_geometry(sphere(), -1.0 * g0), std::domain_error);
  }
}
