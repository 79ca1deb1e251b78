#include <doctest.h>

#include <conelab/harmonics.hpp>
#include <conelab/lojasiewicz.hpp>

#include <cmath>
#include <numbers>

using namespace conelab;

TEST_SUITE("lojasiewicz") {
  TEST_CASE("kernels of the synthetic models") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
    CHECK(kernel_from_jacobian(gradient_jacobian(QuadraticModel(6), zero)).cols() == 0);
    CHECK(kernel_from_jacobian(gradient_jacobian(QuarticModel(6), zero)).cols() == 6);
  }

  TEST_CASE("reduction and exponent of the quadratic model") {
    const QuadraticModel quad(4);
    const ReducedProblem rp(quad, kernel_from_jacobian(gradient_jacobian(quad, Eigen::VectorXd::Zero(4))));
    const ReductionCheck rc = check_reduction(rp, 0.1, 10, 5);
    CHECK(rc.phi_at_zero < 1e-12);
    CHECK(rc.n_of_phi < 1e-10);
    CHECK(rc.phi_of_n < 1e-10);
    const ExponentEstimate ee = estimate_exponent(rp, 0.1, 100, 5);
    CHECK(ee.valid);
    CHECK(ee.alpha_hat == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("exponent of the quartic model") {
    const QuarticModel quart(4);
    const ReducedProblem rp(quart, kernel_from_jacobian(gradient_jacobian(quart, Eigen::VectorXd::Zero(4))));
    const ExponentEstimate ee = estimate_exponent(rp, 0.1, 100, 7);
    CHECK(ee.valid);
    CHECK(ee.alpha_hat == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("gradient flow") {
    const QuadraticModel quad(3);
    // x <- (1 - 2 h) x, so G contracts by (1 - 2 h)^2
    const FlowReport f = gradient_flow(quad, Eigen::VectorXd::Constant(3, 0.1), 0.1, 20);
    CHECK(f.monotone);
    CHECK(f.mean_ratio == doctest::Approx(0.64).epsilon(1e-8));
    const FlowReport z = gradient_flow(quad, Eigen::VectorXd::Zero(3), 0.1, 5);
    CHECK(z.last.norm() == 0.0);
    for (double v : z.values) CHECK(v == 0.0);
  }

  TEST_CASE("slice objective at the base pair") {
    const GridPtr grid = Grid::sphere(24, 48);
    const BackgroundData bg = BackgroundData::round(grid, 1.0);
    const SliceObjective G(bg, slice_basis(bg, 2));
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(G.dim());
    CHECK(G.value(z) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-10));
    CHECK(G.gradient(z).norm() < 1e-8);
    // a slice element round-trips through its coordinates
    Eigen::VectorXd e = Eigen::VectorXd::Zero(G.dim());
    e(0) = 1.0;
    CHECK((G.coordinates(G.tangent(e)) - e).norm() < 1e-8);
  }

  TEST_CASE("slice coordinates reject gauge directions") {
    const GridPtr grid = Grid::sphere(24, 48);
    const BackgroundData bg = BackgroundData::round(grid, 1.0);
    const SliceObjective G(bg, slice_basis(bg, 2));
    const Tensor v = gradient_field(bg.base, real_harmonic(*grid, 2, 0));
    const TangentPair gauge{lie_derivative_metric(bg.base, v), Field::Zero(grid->size())};
    CHECK_THROWS(G.coordinates(gauge));
  }
}
