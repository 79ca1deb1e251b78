#include "conelab/tensor.hpp"

#include <bit>
#include <stdexcept>

namespace conelab {

int Tensor::parity(int idx) const {
  const int thetas = rank - std::popcount(static_cast<unsigned>(idx));
  return (thetas % 2 == 0) ? 1 : -1;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (o.rank != rank) throw std::invalid_argument("tensor rank mismatch");
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (o.rank != rank) throw std::invalid_argument("tensor rank mismatch");
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& x : c) x *= s;
  return *this;
}

Tensor& Tensor::mul(const Field& f) {
  for (auto& x : c) x *= f;
  return *this;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (const auto& x : c) m = std::max(m, x.abs().maxCoeff());
  return m;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }
Tensor operator*(const Field& f, Tensor a) { return a.mul(f); }

Tensor scalar_tensor(const Field& f) {
  Tensor t(0, static_cast<int>(f.size()));
  t.c[0] = f;
  return t;
}

Tensor sym2(const Field& tt, const Field& tp, const Field& pp) {
  Tensor t(2, static_cast<int>(tt.size()));
  t(0, 0) = tt;
  t(0, 1) = tp;
  t(1, 0) = tp;
  t(1, 1) = pp;
  return t;
}

double asymmetry(const Tensor& t) {
  if (t.rank != 2) throw std::invalid_argument("asymmetry expects rank 2");
  return (t(0, 1) - t(1, 0)).abs().maxCoeff();
}

void symmetrize(Tensor& t) {
  Field m = 0.5 * (t(0, 1) + t(1, 0));
  t(0, 1) = m;
  t(1, 0) = m;
}

int comp_index(const std::vector<int>& idx) {
  int f = 0;
  for (int d : idx) f = (f << 1) | d;
  return f;
}

std::vector<int> comp_digits(int flat, int rank) {
  std::vector<int> d(rank);
  for (int k = rank - 1; k >= 0; --k) {
    d[k] = flat & 1;
    flat >>= 1;
  }
  return d;
}

Tensor partial(const Grid& grid, const Tensor& t) {
  Tensor out(t.rank + 1, grid.size());
  const int stride = 1 << t.rank;
  for (int idx = 0; idx < t.ncomp(); ++idx) {
    out.c[idx] = grid.d_theta(t.c[idx], t.parity(idx));
    out.c[stride + idx] = grid.d_phi(t.c[idx]);
  }
  return out;
}

Tensor contract(const Tensor& t, int i, int j, const Tensor& ginv) {
  if (i >= j || j >= t.rank) throw std::invalid_argument("contract: bad slots");
  const int r = t.rank - 2;
  Tensor out(r, t.nodes());
  for (int flat = 0; flat < t.ncomp(); ++flat) {
    auto d = comp_digits(flat, t.rank);
    std::vector<int> rest;
    for (int k = 0; k < t.rank; ++k)
      if (k != i && k != j) rest.push_back(d[k]);
    out.c[comp_index(rest)] += ginv(d[i], d[j]) * t.c[flat];
  }
  return out;
}

Field full_inner(const Tensor& a, const Tensor& b, const Tensor& ginv) {
  if (a.rank != b.rank) throw std::invalid_argument("full_inner: rank mismatch");
  Field s = Field::Zero(a.nodes());
  for (int fa = 0; fa < a.ncomp(); ++fa) {
    auto da = comp_digits(fa, a.rank);
    for (int fb = 0; fb < b.ncomp(); ++fb) {
      auto db = comp_digits(fb, b.rank);
      Field w = Field::Ones(a.nodes());
      for (int k = 0; k < a.rank; ++k) w *= ginv(da[k], db[k]);
      s += w * a.c[fa] * b.c[fb];
    }
  }
  return s;
}

}  // namespace conelab
