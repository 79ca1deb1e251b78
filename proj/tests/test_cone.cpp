#include <doctest.h>

#include <conelab/cone.hpp>
#include <conelab/eguchi_hanson.hpp>

#include <cmath>
#include <numbers>

using namespace conelab;

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

TEST_SUITE("cone") {
  TEST_CASE("Green profiles of exact cones") {
    const WarpedModel m_e = WarpedModel::euclidean();
    const GreenProfile e = solve_green_radial(m_e);
    for (double s : {0.2, 1.0, 5.0}) CHECK(e.b(s) == doctest::Approx(s).epsilon(1e-10));
    // b = c s with c = (c / 0.9)^2
    const WarpedModel m_c = WarpedModel::cone(0.9);
    const GreenProfile c = solve_green_radial(m_c);
    for (double s : {0.2, 1.0, 5.0}) CHECK(c.db(s) == doctest::Approx(0.81).epsilon(1e-10));
    CHECK(c.b(4.0) / c.b(2.0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(c.max_residual() < 1e-8);
  }

  TEST_CASE("tanh warp approaches the outer cone") {
    const WarpedModel m = WarpedModel::tanh_warp(1.2, 0.9);
    const GreenProfile gp = solve_green_radial(m);
    CHECK(gp.b_inf_estimate() == doctest::Approx(0.81).epsilon(1e-3));
    for (double s : {0.2, 1.0, 3.0, 10.0}) CHECK(gp.db(s) > 0.0);
  }

  TEST_CASE("trace-free Hessian vanishes on cones") {
    const WarpedModel m_c = WarpedModel::cone(0.9);
    const GreenProfile c = solve_green_radial(m_c);
    for (double s : {0.5, 2.0}) CHECK(trace_free_hessian(c, s).norm_B2() < 1e-16);
    const WarpedModel m_t = WarpedModel::tanh_warp(1.2, 0.9);
    const GreenProfile t = solve_green_radial(m_t);
    const LevelSetData d = trace_free_hessian(t, 1.0);
    CHECK(d.B_nt == 0.0);
    CHECK(d.norm_B2() > 1e-6);
  }

  TEST_CASE("A and Q on cones") {
    const WarpedModel m_e = WarpedModel::euclidean();
    const GreenProfile e = solve_green_radial(m_e);
    const WarpedModel m_c = WarpedModel::cone(0.9);
    const GreenProfile c = solve_green_radial(m_c);
    for (double r : {0.5, 2.0}) {
      CHECK(eval_A_of_r(e, r) == doctest::Approx(kFourPi).epsilon(1e-10));
      CHECK(eval_A_of_r(c, r) == doctest::Approx(0.6561 * kFourPi).epsilon(1e-9));
      CHECK(std::abs(eval_Aprime(c, r)) < 1e-8);
      CHECK(eval_Q_of_r(c, r).value < 1e-10);
      CHECK(stokes_flux(c, r) == doctest::Approx(kFourPi).epsilon(1e-8));
    }
  }

  TEST_CASE("level-set formula") {
    const BackgroundData base = BackgroundData::round(Grid::sphere(24, 48), 1.0);
    const WarpedModel m_gp = WarpedModel::tanh_warp(1.2, 0.9);
    const GreenProfile gp = solve_green_radial(m_gp);
    for (double R : {1.0, 3.0}) CHECK(eval_R_levelset(gp, R, base).difference < 1e-8);
  }

  TEST_CASE("level identities on a flat cone") {
    const WarpedModel m_e = WarpedModel::euclidean();
    const GreenProfile e = solve_green_radial(m_e);
    const LevelIdentityReport r = check_appendix_b(e, 1.0);
    CHECK(r.max_general < 1e-8);
    CHECK(r.max_flat_form < 1e-8);
  }

  TEST_CASE("property on the exact cone") {
    const BackgroundData base = BackgroundData::round(Grid::sphere(24, 48), 1.0);
    const WarpedModel m_c = WarpedModel::cone(0.9);
    const GreenProfile c = solve_green_radial(m_c);
    const PropertyReport p = check_property5(c, {0.5, 1.0}, base);
    for (const auto& s : p.samples) CHECK(s.lhs <= 1e-8);
  }

  TEST_CASE("spread ratio") {
    CHECK(spread_ratio({0.0, 0.0}) == 1.0);
    CHECK(std::isinf(spread_ratio({0.0, 1.0})));
    CHECK(spread_ratio({2.0, 1.0, 4.0}) == 4.0);
  }

  TEST_CASE("invalid models are rejected") {
    CHECK_THROWS(WarpedModel::polynomial({-1.0, 0.0}).validate());
  }
}

TEST_SUITE("eguchi-hanson") {
  TEST_CASE("asymptotics and monotonicity") {
    const EguchiHanson eh(1.0);
    CHECK(eh.b_inf() == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(eh.b(200.0) / 200.0 == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-4));
    CHECK(eh.radius_of_level(eh.b(2.5)) == doctest::Approx(2.5).epsilon(1e-10));
    for (double R : {0.8, 1.5, 3.0}) {
      CHECK(eh.Aprime(R) < 0.0);
      CHECK(eh.Aprime(R) / eh.monotonicity_rhs(R) == doctest::Approx(1.0).epsilon(1e-2));
      CHECK(eh.stokes_flux(R) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-8));
    }
  }

  TEST_CASE("Ricci flat and flat-form level identities") {
    const EguchiHanson eh(1.0);
    CHECK(eh.ricci_residual(1.5) < 1e-6);
    CHECK(check_appendix_b(eh.level_data(eh.radius_of_level(1.5))).max_flat_form < 1e-5);
  }

  TEST_CASE("coordinate curvature of the round 3-sphere") {
    const CoordinateMetric g = [](const Eigen::VectorXd& x) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
      m(0, 0) = 1.0;
      m(1, 1) = std::pow(std::sin(x(0)), 2);
      m(2, 2) = std::pow(std::sin(x(0)) * std::sin(x(1)), 2);
      return m;
    };
    const Eigen::VectorXd x = Eigen::Vector3d(1.0, 1.2, 0.3);
    const CoordinateCurvature cc = coordinate_curvature(g, x);
    CHECK(cc.scalar == doctest::Approx(6.0).epsilon(1e-6));
    CHECK((cc.ricci - 2.0 * cc.g).norm() < 1e-6);
  }
}
