#pragma once

#include "conelab/functionals.hpp"

#include <functional>
#include <string>
#include <vector>

namespace conelab {

// ds^2 + f(s)^2 g_{S^{n-1}} on [s0, s1].
struct WarpedModel {
  std::string name;
  int n = 3;
  double s0 = 0.1, s1 = 10.0;
  std::function<double(double)> f, df, ddf;
  // Natural anchor for the Green profile: b(anchor_s) = anchor_b.
  double anchor_s = 1.0, anchor_b = 1.0;
  // Slope of f if the model is an exact cone, 0 otherwise.
  double cone_slope = 0.0;

  bool exact_cone() const { return cone_slope > 0.0; }
  // Throws if f is not positive on a fine sample of the interval.
  void validate() const;

  static WarpedModel euclidean(int n = 3, double s0 = 0.1, double s1 = 10.0);
  static WarpedModel cone(double a, int n = 3, double s0 = 0.1, double s1 = 10.0);
  // f' runs from a_in (s << sc) to a_out (s >> sc) with a tanh profile of
  // the given width; f(0) = 0.  Anchored on the outer cone.
  static WarpedModel tanh_warp(double a_in, double a_out, double sc = 1.0, double width = 0.3, int n = 3,
                               double s0 = 0.1, double s1 = 20.0);
  // f = s exp(eps psi(log s)) with psi a smooth bump supported in
  // |log s| < width.  Equals the Euclidean warp outside the support.
  static WarpedModel log_bump(double eps, double width = 1.0, int n = 3, double s0 = 0.05, double s1 = 20.0);
  // f = sum c_k s^k.  Anchored with b/f at the fixed point for slope f'(s1).
  static WarpedModel polynomial(std::vector<double> coeffs, int n = 3, double s0 = 0.1, double s1 = 10.0);
};

// b' = (b/f)^{n-1}, together with q(s) = int_s^{s1} b^{-n}|Hess b^2 - (Lap b^2/n) g|^2.
// Keeps a pointer to the model, which must outlive the profile.
class GreenProfile {
 public:
  GreenProfile(const WarpedModel& m, double s_a, double b_a, int nodes = 400);

  const WarpedModel& model() const { return *m_; }
  double b(double s) const;
  double q(double s) const;
  // Derivatives in s, closed form from the ODE.
  double db(double s) const;
  double d2b(double s, double bs) const;
  double d3b(double s, double bs) const;
  // s with b(s) = R.  Throws std::domain_error if the level is not attained.
  double level(double R) const;
  bool attains(double R) const { return R >= b_lo_ && R <= b_hi_; }
  double b_min() const { return b_lo_; }
  double b_max() const { return b_hi_; }
  // b'(s1), the slope of b at the outer end.
  double b_inf_estimate() const;
  // Largest |b' f^{n-1} - b^{n-1}| / b^{n-1} over the nodes, with b' taken by
  // differencing the integrated profile.
  double max_residual() const;
  // Estimate of the part of q beyond s1, from the decay rate at s1.
  double q_tail() const { return q_tail_; }
  const std::vector<double>& nodes() const { return s_; }

 private:
  std::pair<double, double> state_at(double s) const;

  const WarpedModel* m_;
  std::vector<double> s_, bv_, qv_;
  double b_lo_ = 0.0, b_hi_ = 0.0, q_tail_ = 0.0;
};

GreenProfile solve_green_radial(const WarpedModel& m, double s_a, double b_a);
GreenProfile solve_green_radial(const WarpedModel& m);

// Everything at one level set, in an orthonormal frame e_n = grad b/|grad b|,
// e_i tangent (principal directions).  Derivatives are in arclength along e_n.
struct LevelSetData {
  int n = 3;
  double s = 0.0;
  double b = 0.0, grad = 0.0, b2 = 0.0, b3 = 0.0;  // b, b', b'', b'''
  double radius = 0.0;                             // length scale of the level (f for warps)
  double area = 0.0;                               // volume of the level set

  std::vector<double> kappa, dkappa;  // principal curvatures and their s-derivatives

  double hess_nn = 0.0;            // Hess b^2 (n, n)
  std::vector<double> hess_tan;    // Hess b^2 (e_i, e_i)
  double lap_b2 = 0.0;
  double B_nn = 0.0, B_nt = 0.0;   // B_nt = |B(n)^T|, zero by symmetry
  std::vector<double> B_tan;
  double dB_nn = 0.0;              // d/ds of B(n, n)
  std::vector<double> dB_tan;
  // |grad B|^2 contributions from the connection of the level set itself
  // (zero when the tangential eigenvalues of B agree).
  double tangential_dB2 = 0.0;

  double H = 0.0;
  std::vector<double> II0;

  // Intrinsic curvature of the level set.
  double scalar_T = 0.0;
  std::vector<double> ric_T;
  // Ambient curvature.
  double ric_nn = 0.0, scalar_M = 0.0;
  std::vector<double> ric_tan, k_rad;  // Ric(e_i, e_i), Rm(e_i, n, e_i, n)

  double trace_B() const;
  double norm_B2() const;
  double norm_B0_2() const;
  // |grad B|^2 for B = B_nn n n + sum B_ii e_i e_i depending on s only.
  double norm_dB2() const;
};

LevelSetData trace_free_hessian(const GreenProfile& gp, double s);

struct IdentityResidual {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  double residual = 0.0;        // scale-invariant, relative to max(1, |lhs|, |rhs|)
  bool ricci_corrected = false;
  double flat_residual = 0.0;  // same identity without the ambient curvature terms
};

struct LevelIdentityReport {
  double s = 0.0, b = 0.0;
  std::vector<IdentityResidual> items;
  double max_general = 0.0;         // identities that hold on any metric
  double max_corrected = 0.0;       // Ricci-corrected forms
  double max_flat_form = 0.0;      // Ricci-flat forms, ambient terms dropped
  double level_ricci_ratio = 0.0;  // |b^2 Ric^T - (n-2)|grad b|^2 g^T| / (|B| + b|grad B|)
  const IdentityResidual& find(const std::string& name) const;
};

LevelIdentityReport check_appendix_b(const LevelSetData& d);
LevelIdentityReport check_appendix_b(const GreenProfile& gp, double s);

// A(r) = r^{1-n} int_{b=r} |grad b|^3 and its r-derivative, both closed form.
double eval_A_of_r(const GreenProfile& gp, double r);
double eval_Aprime(const GreenProfile& gp, double r);
struct QValue {
  double value = 0.0;  // truncated at s1
  double tail = 0.0;   // estimate of the omitted part
};
QValue eval_Q_of_r(const GreenProfile& gp, double r);
// int_{r1 <= b <= r2} b^{-n} |Hess b^2 - (Lap b^2/n) g|^2
double annulus_energy(const GreenProfile& gp, double r1, double r2);
// r^{1-n} int_{b=r} |grad b|; equals Vol(S^{n-1}) for every profile.
double stokes_flux(const GreenProfile& gp, double r);

struct LevelFunctional {
  double R = 0.0, s = 0.0;
  double x = 0.0;               // b / f at the level
  double via_functional = 0.0;  // R on (R^-2 g_R, |grad b|) evaluated on the grid
  double a_of_r = 0.0;
  double b_correction = 0.0;    // trace-free Hessian integral
  double ricci_correction = 0.0;  // ambient term; zero on Ricci-flat models
  double via_levelset = 0.0;    // a_of_r + b_correction + ricci_correction
  double difference = 0.0;      // relative
};

// Level pair (R^-2 g_R, |grad b|) on the grid of `base`.
WeightedPair level_pair(const GreenProfile& gp, double R, const BackgroundData& base);
LevelFunctional eval_R_levelset(const GreenProfile& gp, double R, const BackgroundData& base);

struct PropertySample {
  double R = 0.0;
  double lhs = 0.0;        // |grad_1 R|^2, or A - R for (5)
  double energy = 0.0;     // annulus integral over [R/2, 3R/2]
  double ratio = 0.0;      // max(lhs, 0) / energy (0 when both vanish)
  double c1_norm2 = 0.0;   // |B|^2 + R^2 |grad B|^2 at b = R
  double c1_ratio = 0.0;   // c1_norm2 / energy
  double r_aprime = 0.0;   // -R A'(R)
};

struct PropertyReport {
  int property = 4;
  std::string model;
  std::vector<PropertySample> samples;
  double fitted_c = 0.0;    // smallest C with lhs <= C energy at every sample
  double fitted_c1 = 0.0;   // same for the C^1 bound
  bool holds(double c) const;
};

// Levels R must have [R/2, 3R/2] attained by the profile.
PropertyReport check_property4(const GreenProfile& gp, const std::vector<double>& radii, const BackgroundData& base);
PropertyReport check_property5(const GreenProfile& gp, const std::vector<double>& radii, const BackgroundData& base);

struct FamilyReport {
  std::vector<std::string> models;
  std::vector<double> c4, c5, c1;
  double spread4 = 0.0, spread5 = 0.0;  // max / min across the family
  double uniform_c4 = 0.0, uniform_c5 = 0.0;
  bool holds4 = false, holds5 = false;  // with the uniform constant at every sample
  bool bounded(double max_spread) const { return spread4 <= max_spread && spread5 <= max_spread; }
};

// max/min of a list of nonnegative constants; 1 if all are zero, infinity
// if only some are.
double spread_ratio(const std::vector<double>& c);

FamilyReport check_property_family(const std::vector<WarpedModel>& family, const std::vector<double>& radii,
                                   const BackgroundData& base);

// The log_bump family used for the property sweep.
std::vector<WarpedModel> bump_family(const std::vector<double>& eps = {0.2, 0.1, 0.05, 0.025, 0.0125});

}  // namespace conelab
