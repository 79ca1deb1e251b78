#pragma once

#include "conelab/geometry.hpp"

namespace conelab {

struct WeightedPair {
  Tensor g;
  Field w;
};

// Variation (h, v) along (g + t h, w e^{t v}).
struct TangentPair {
  Tensor h;
  Field v;

  TangentPair& operator+=(const TangentPair& o);
  TangentPair& operator-=(const TangentPair& o);
  TangentPair& operator*=(double s);
};
TangentPair operator+(TangentPair a, const TangentPair& b);
TangentPair operator-(TangentPair a, const TangentPair& b);
TangentPair operator*(double s, TangentPair a);
TangentPair zero_tangent(int nodes);

// Area of the unit sphere in R^n.
double unit_sphere_volume(int n);

struct BackgroundData {
  GridPtr grid;
  int n = 3;
  double b_inf = 1.0;
  Tensor g0;    // Ric = (n-2) g0
  Tensor gbar;  // b_inf^{-2} g0
  Geometry base;  // geometry of gbar
  // A_1 of the base pair.  Equals Vol(dB_1) exactly when b_inf^{n-2} equals
  // Vol(g0) / Vol(S^{n-1}); for the round unit S^2 that forces b_inf = 1.
  double level = 0.0;

  static BackgroundData round(const GridPtr& grid, double b_inf, int n = 3);
  WeightedPair base_pair() const;
  double volume() const { return unit_sphere_volume(n); }
  bool consistent() const;
};

double eval_A(const Geometry& geo, const Field& w);
double eval_B(const Geometry& geo, const Field& w);
double eval_A1(const Geometry& geo, const Field& w);
double eval_R(const Geometry& geo, const Field& w, int n);

double eval_A(const GridPtr& grid, const WeightedPair& p);
double eval_B(const GridPtr& grid, const WeightedPair& p);
double eval_A1(const GridPtr& grid, const WeightedPair& p);
double eval_R(const GridPtr& grid, const WeightedPair& p, int n);

// [Psi(J)]_ij = gbar_ik g^kn J_nm g^ml gbar_lj
Tensor psi_map(const Tensor& g, const Tensor& J, const Tensor& base);

// Fixed inner product at (gbar, b_inf).
double l2_inner(const BackgroundData& bg, const TangentPair& x, const TangentPair& y);
double l2_norm(const BackgroundData& bg, const TangentPair& x);

// Smallest eigenvalue of gbar^{-1} g over nodes.
double min_relative_eigenvalue(const Tensor& g, const Tensor& gbar);
bool in_guard(const BackgroundData& bg, const WeightedPair& p);
void require_guard(const BackgroundData& bg, const WeightedPair& p, const char* who);

TangentPair grad_R(const WeightedPair& p, const BackgroundData& bg);
TangentPair grad_A1(const WeightedPair& p, const BackgroundData& bg);
TangentPair project_gradient(const WeightedPair& p, const BackgroundData& bg);
// Same, for a precomputed gradient pair.
TangentPair project_out(const BackgroundData& bg, const TangentPair& grad, const TangentPair& grad_a1);

WeightedPair exp_chart(const TangentPair& x, const BackgroundData& bg);

double first_variation_A(const GridPtr& grid, const WeightedPair& p, const TangentPair& x);
double first_variation_B(const GridPtr& grid, const WeightedPair& p, const TangentPair& x);
double first_variation_A1(const GridPtr& grid, const WeightedPair& p, const TangentPair& x);

// int (Tr(h)/2 + v) w dmu_g
double tangency_residual(const GridPtr& grid, const WeightedPair& p, const TangentPair& x);

// Point on the path (g + t h, w e^{t v}).
WeightedPair move(const WeightedPair& p, const TangentPair& x, double t);

}  // namespace conelab
