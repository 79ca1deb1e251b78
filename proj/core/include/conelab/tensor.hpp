#pragma once

#include "conelab/grid.hpp"

#include <initializer_list>
#include <vector>

namespace conelab {

// Nodal tensor field of arbitrary rank on a 2-d chart.  Component
// (i_0, ..., i_{r-1}) with i_k in {0 = theta, 1 = phi} lives at
// c[sum i_k 2^(r-1-k)].  Index placement (upper/lower) is by convention of
// the producing routine; derivative indices are prepended.
struct Tensor {
  int rank = 0;
  std::vector<Field> c;

  Tensor() = default;
  Tensor(int r, int n) : rank(r), c(static_cast<std::size_t>(1) << r, Field::Zero(n)) {}

  int nodes() const { return c.empty() ? 0 : static_cast<int>(c[0].size()); }
  int ncomp() const { return static_cast<int>(c.size()); }

  Field& operator()(int a) { return c[a]; }
  const Field& operator()(int a) const { return c[a]; }
  Field& operator()(int a, int b) { return c[(a << 1) | b]; }
  const Field& operator()(int a, int b) const { return c[(a << 1) | b]; }
  Field& operator()(int a, int b, int d) { return c[(a << 2) | (b << 1) | d]; }
  const Field& operator()(int a, int b, int d) const { return c[(a << 2) | (b << 1) | d]; }
  Field& operator()(int a, int b, int d, int e) { return c[(a << 3) | (b << 2) | (d << 1) | e]; }
  const Field& operator()(int a, int b, int d, int e) const {
    return c[(a << 3) | (b << 2) | (d << 1) | e];
  }

  // (-1)^(number of theta slots) for component index idx.
  int parity(int idx) const;

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  Tensor& operator*=(double s);
  Tensor& mul(const Field& f);  // pointwise scaling

  double max_abs() const;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);
Tensor operator*(const Field& f, Tensor a);

Tensor scalar_tensor(const Field& f);

// Symmetric rank-2 from three component fields.
Tensor sym2(const Field& tt, const Field& tp, const Field& pp);

// Largest |T_ab - T_ba| over nodes.
double asymmetry(const Tensor& t);
void symmetrize(Tensor& t);

// Partial derivative; result has the derivative index in slot 0.
Tensor partial(const Grid& grid, const Tensor& t);

// Contract slots i < j with an inverse metric (upper indices).
Tensor contract(const Tensor& t, int i, int j, const Tensor& ginv);

// Pointwise contraction of all slots of a and b, indices raised by ginv.
Field full_inner(const Tensor& a, const Tensor& b, const Tensor& ginv);

// Component-index helpers.
int comp_index(const std::vector<int>& idx);
std::vector<int> comp_digits(int flat, int rank);

}  // namespace conelab
