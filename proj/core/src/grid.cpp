#include "conelab/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conelab {

namespace {
constexpr double kPi = std::numbers::pi;

double diff_entry(int k, int m) {
  k %= m;
  if (k < 0) k += m;
  if (k == 0) return 0.0;
  const double h = 2.0 * kPi / m;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return 0.5 * sign / std::tan(0.5 * k * h);
}
}  // namespace

Eigen::MatrixXd fourier_diff_matrix(int m) {
  Eigen::MatrixXd d(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d(i, j) = diff_entry(i - j, m);
  return d;
}

Eigen::VectorXd fejer_weights(int n) {
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    const double th = (j + 0.5) * kPi / n;
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k) s += std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
    w(j) = 2.0 / n * (1.0 - 2.0 * s);
  }
  return w;
}

std::shared_ptr<const Grid> Grid::sphere(int n_lat, int n_lon) {
  if (n_lat < 4 || n_lon < 4 || n_lon % 2 != 0)
    throw std::invalid_argument("sphere grid needs n_lat >= 4 and even n_lon >= 4");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->kind_ = GridKind::sphere;
  g->n_lat_ = n_lat;
  g->n_lon_ = n_lon;
  g->theta_.resize(n_lat);
  g->phi_.resize(n_lon);
  for (int i = 0; i < n_lat; ++i) g->theta_(i) = (i + 0.5) * kPi / n_lat;
  for (int k = 0; k < n_lon; ++k) g->phi_(k) = 2.0 * kPi * k / n_lon;

  const int n = n_lat * n_lon;
  const Eigen::VectorXd fw = fejer_weights(n_lat);
  const double dphi = 2.0 * kPi / n_lon;
  g->theta_nodes_.resize(n);
  g->phi_nodes_.resize(n);
  g->weights_.resize(n);
  g->density_.resize(n);
  for (int i = 0; i < n_lat; ++i)
    for (int k = 0; k < n_lon; ++k) {
      const int p = g->index(i, k);
      g->theta_nodes_(p) = g->theta_(i);
      g->phi_nodes_(p) = g->phi_(k);
      g->weights_(p) = fw(i) * dphi;
      g->density_(p) = std::sin(g->theta_(i));
    }

  // Extended colatitude circle has 2 n_lat points; theta_i sits at slot
  // n_lat + i and -theta_j at slot n_lat - 1 - j.
  const int m = 2 * n_lat;
  g->d_pos_.resize(n_lat, n_lat);
  g->d_neg_.resize(n_lat, n_lat);
  for (int i = 0; i < n_lat; ++i)
    for (int j = 0; j < n_lat; ++j) {
      g->d_pos_(i, j) = diff_entry(i - j, m);
      g->d_neg_(i, j) = diff_entry(i + j + 1, m);
    }
  g->d_lon_ = fourier_diff_matrix(n_lon);
  return g;
}

std::shared_ptr<const Grid> Grid::torus(int n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("torus grid needs even n >= 4");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->kind_ = GridKind::torus;
  g->n_lat_ = n;
  g->n_lon_ = n;
  g->theta_.resize(n);
  g->phi_.resize(n);
  for (int i = 0; i < n; ++i) {
    g->theta_(i) = 2.0 * kPi * i / n;
    g->phi_(i) = 2.0 * kPi * i / n;
  }
  const int sz = n * n;
  const double h = 2.0 * kPi / n;
  g->theta_nodes_.resize(sz);
  g->phi_nodes_.resize(sz);
  g->weights_ = Field::Constant(sz, h * h);
  g->density_ = Field::Ones(sz);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      g->theta_nodes_(g->index(i, k)) = g->theta_(i);
      g->phi_nodes_(g->index(i, k)) = g->phi_(k);
    }
  g->d_pos_ = fourier_diff_matrix(n);
  g->d_lon_ = g->d_pos_;
  return g;
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Field Grid::d_theta(const Field& f, int parity) const {
  if (f.size() != size()) throw std::invalid_argument("d_theta: field does not match grid");
  Eigen::Map<const RowMat> F(f.data(), n_lat_, n_lon_);
  Field out(size());
  Eigen::Map<RowMat> O(out.data(), n_lat_, n_lon_);
  if (kind_ == GridKind::torus) {
    O.noalias() = d_pos_ * F;
    return out;
  }
  const int half = n_lon_ / 2;
  RowMat shifted(n_lat_, n_lon_);
  shifted.leftCols(half) = F.rightCols(n_lon_ - half);
  shifted.rightCols(n_lon_ - half) = F.leftCols(half);
  O.noalias() = d_pos_ * F;
  O.noalias() += static_cast<double>(parity) * (d_neg_ * shifted);
  return out;
}

Field Grid::d_phi(const Field& f) const {
  if (f.size() != size()) throw std::invalid_argument("d_phi: field does not match grid");
  Eigen::Map<const RowMat> F(f.data(), n_lat_, n_lon_);
  Field out(size());
  Eigen::Map<RowMat> O(out.data(), n_lat_, n_lon_);
  O.noalias() = F * d_lon_.transpose();
  return out;
}

}  // namespace conelab
