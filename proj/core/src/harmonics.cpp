#include "conelab/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conelab {

Field real_harmonic(const Grid& grid, int l, int m) {
  if (grid.kind() != GridKind::sphere) throw std::invalid_argument("real_harmonic: sphere grid required");
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("real_harmonic: bad (l, m)");
  const int am = std::abs(m);
  Field out(grid.size());
  for (int i = 0; i < grid.n_lat(); ++i) {
    const double p = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am), grid.theta(i));
    for (int k = 0; k < grid.n_lon(); ++k) {
      const double ph = grid.phi(k);
      double v = p;
      if (m > 0) v *= std::numbers::sqrt2 * std::cos(am * ph);
      if (m < 0) v *= std::numbers::sqrt2 * std::sin(am * ph);
      out(grid.index(i, k)) = v;
    }
  }
  return out;
}

std::vector<std::pair<int, int>> harmonic_indices(int lmin, int lmax) {
  std::vector<std::pair<int, int>> out;
  for (int l = lmin; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) out.emplace_back(l, m);
  return out;
}

Embedding unit_embedding(const Grid& grid) {
  Embedding e;
  const Field& th = grid.theta_nodes();
  const Field& ph = grid.phi_nodes();
  e.x[0] = th.sin() * ph.cos();
  e.x[1] = th.sin() * ph.sin();
  e.x[2] = th.cos();
  e.dth[0] = th.cos() * ph.cos();
  e.dth[1] = th.cos() * ph.sin();
  e.dth[2] = -th.sin();
  e.dph[0] = -th.sin() * ph.sin();
  e.dph[1] = th.sin() * ph.cos();
  e.dph[2] = Field::Zero(grid.size());
  return e;
}

FieldSampler::FieldSampler(GridPtr grid, std::uint64_t seed, int degree)
    : grid_(std::move(grid)), rng_(seed), degree_(degree) {}

Field FieldSampler::ambient_poly(int deg) {
  const int n = grid_->size();
  Field out = Field::Zero(n);
  if (grid_->kind() == GridKind::torus) {
    const Field& x = grid_->theta_nodes();
    const Field& y = grid_->phi_nodes();
    for (int j = 0; j <= deg; ++j)
      for (int k = -deg; k <= deg; ++k) {
        if (std::abs(j) + std::abs(k) > deg) continue;
        const Field arg = j * x + k * y;
        out += normal() * arg.cos();
        if (j != 0 || k != 0) out += normal() * arg.sin();
      }
    return out;
  }
  const Embedding e = unit_embedding(*grid_);
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      for (int c = 0; a + b + c <= deg; ++c)
        out += normal() * e.x[0].pow(a) * e.x[1].pow(b) * e.x[2].pow(c);
  return out;
}

Field FieldSampler::scalar() { return ambient_poly(degree_); }

Field FieldSampler::scalar_mean_zero() {
  Field f = scalar();
  const Field& w = grid_->quad_weights();
  return f - (f * w).sum() / w.sum();
}

Tensor FieldSampler::sym_tensor() {
  const int n = grid_->size();
  if (grid_->kind() == GridKind::torus) return sym2(ambient_poly(degree_), ambient_poly(degree_), ambient_poly(degree_));
  const Embedding e = unit_embedding(*grid_);
  Field H[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      H[i][j] = ambient_poly(degree_ - 1);
      H[j][i] = H[i][j];
    }
  Tensor h(2, n);
  const Field* d[2] = {e.dth, e.dph};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Field s = Field::Zero(n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += d[a][i] * d[b][j] * H[i][j];
      h(a, b) = s;
    }
  symmetrize(h);
  return h;
}

Tensor FieldSampler::vector_up() {
  const int n = grid_->size();
  Tensor v(1, n);
  if (grid_->kind() == GridKind::torus) {
    v(0) = ambient_poly(degree_);
    v(1) = ambient_poly(degree_);
    return v;
  }
  const Embedding e = unit_embedding(*grid_);
  Field U[3];
  for (auto& u : U) u = ambient_poly(degree_);
  Field low_t = Field::Zero(n), low_p = Field::Zero(n);
  for (int i = 0; i < 3; ++i) {
    low_t += e.dth[i] * U[i];
    low_p += e.dph[i] * U[i];
  }
  const Field s2 = grid_->theta_nodes().sin().square();
  v(0) = low_t;
  v(1) = low_p / s2;
  return v;
}

Tensor gradient_field(const Geometry& round, const Field& y) {
  return raise(round, gradient_form(round, y));
}

Tensor rotated_gradient_field(const Geometry& round, const Field& y) {
  const Tensor dy = gradient_form(round, y);
  const Field inv_sqrt = round.det.sqrt().inverse();
  Tensor v(1, round.grid->size());
  v(0) = inv_sqrt * dy(1);
  v(1) = -inv_sqrt * dy(0);
  return v;
}

}  // namespace conelab
