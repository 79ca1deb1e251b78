#include <doctest.h>

#include <conelab/harmonics.hpp>
#include <conelab/linearization.hpp>

#include <cmath>

using namespace conelab;

namespace {
const GridPtr& sphere() {
  static const GridPtr g = Grid::sphere(32, 64);
  return g;
}
double l2(const Geometry& g, const Tensor& t) { return std::sqrt(integrate(g, inner(g, t, t))); }
}  // namespace

TEST_SUITE("linearization") {
  TEST_CASE("York split of a conformal tensor") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const Field phi = real_harmonic(*sphere(), 2, 0) + 0.5 * real_harmonic(*sphere(), 3, 1);
    const YorkParts yp = york_decompose(phi * bg.gbar, bg);
    CHECK((yp.phi - phi).abs().maxCoeff() < 1e-9);
    CHECK(yp.gauge.max_abs() < 1e-9);
    CHECK(yp.tt.max_abs() < 1e-9);
  }

  TEST_CASE("York split of a pure gauge tensor") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const Field y = real_harmonic(*sphere(), 2, 1);
    const Tensor h = lie_derivative_metric(bg.base, gradient_field(bg.base, y));  // 2 Hess Y
    const YorkParts yp = york_decompose(h, bg);
    CHECK((yp.phi + 6.0 * y).abs().maxCoeff() < 1e-9);  // Tr h / 2 = Lap Y
    CHECK((yp.gauge - (h - yp.phi * bg.gbar)).max_abs() < 1e-9);
    CHECK(yp.tt.max_abs() < 1e-9);
  }

  TEST_CASE("random tensors have no TT part on the round sphere") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.3);
    FieldSampler fs(sphere(), 31);
    const Tensor h = fs.sym_tensor();
    const YorkParts yp = york_decompose(h, bg);
    CHECK((yp.tt + yp.conformal + yp.gauge - h).max_abs() < 1e-8 * h.max_abs());
    CHECK(l2(bg.base, yp.tt) < 1e-8 * l2(bg.base, h));
  }

  TEST_CASE("structure basis") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const VariationBasis sb = structure_basis(bg, 3);
    CHECK(sb.count(BasisLabel::tt) == 0);
    CHECK(sb.count(BasisLabel::diffeo) > 0);
    CHECK((sb.gram - Eigen::MatrixXd::Identity(sb.dim(), sb.dim())).norm() < 1e-10);
    CHECK(sb.max_constraint_residual(bg) < 1e-10);
  }

  TEST_CASE("kernel of synthetic matrices") {
    OperatorMatrix m;
    m.m = Eigen::VectorXd((Eigen::VectorXd(5) << 1.0, 2.0, 0.0, 3.0, 0.0).finished()).asDiagonal();
    m.labels.assign(5, BasisLabel::conformal);
    CHECK(m.symmetry_defect() == 0.0);
    const KernelResult k = kernel_of_L(m);
    CHECK(k.dim() == 2);
    CHECK(std::abs(k.vectors.col(0).cwiseAbs().maxCoeff() - 1.0) < 1e-14);

    OperatorMatrix inv;
    inv.m = Eigen::MatrixXd::Identity(4, 4) * 2.0;
    inv.m(0, 1) = inv.m(1, 0) = 0.5;
    inv.labels.assign(4, BasisLabel::conformal);
    CHECK(kernel_of_L(inv, 0.0).dim() == 0);
  }

  TEST_CASE("diffeomorphism directions are annihilated") {
    const BackgroundData bg = BackgroundData::round(sphere(), 1.0);
    const Field y = real_harmonic(*sphere(), 2, -1);
    const Tensor v = gradient_field(bg.base, y);
    const TangentPair x{lie_derivative_metric(bg.base, v), directional(bg.base, v, Field::Constant(sphere()->size(), bg.b_inf))};
    const TangentPair lx = linearized_gradient(bg, x);
    CHECK(l2_norm(bg, lx) < 1e-6 * l2_norm(bg, x));
  }
}
