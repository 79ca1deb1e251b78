#pragma once

#include "conelab/cone.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace conelab {

using CoordinateMetric = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct CoordinateCurvature {
  int dim = 0;
  Eigen::MatrixXd g, ginv, ricci;
  std::vector<double> riemann;  // R_abcd, row-major
  double scalar = 0.0;

  double rm(int a, int b, int c, int d) const { return riemann[((a * dim + b) * dim + c) * dim + d]; }
  // R(u, v, w, z) for coordinate vectors.
  double rm(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w,
            const Eigen::VectorXd& z) const;
  double ric(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return u.dot(ricci * v); }
};

// Curvature of a coordinate metric at x from fourth-order central
// differences of the metric (step h, nested for second derivatives).
// Convention: R_abab is the sectional curvature of an orthonormal pair.
CoordinateCurvature coordinate_curvature(const CoordinateMetric& g, const Eigen::VectorXd& x, double h = 1e-3);

// Eguchi-Hanson on r > a in Euler angles (theta, phi, psi):
//   dr^2 / (1 - a^4/r^4) + r^2/4 (s1^2 + s2^2) + r^2/4 (1 - a^4/r^4) s3^2,
// with d s_i = -s_j ^ s_k.  The radial function b = G^{-1/2},
//   G = a^{-2} log((r^2 + a^2) / (r^2 - a^2)),
// is harmonic with r^{-3} int_{b=r} |grad b| = Vol(S^3).
class EguchiHanson {
 public:
  explicit EguchiHanson(double a = 1.0);

  double a() const { return a_; }
  int n() const { return 4; }
  Eigen::MatrixXd metric(const Eigen::VectorXd& x) const;  // x = (r, theta, phi, psi)
  Eigen::MatrixXd level_metric(double r, const Eigen::VectorXd& angles) const;

  double G(double r) const;
  double b(double r) const;
  // r with b(r) = R.
  double radius_of_level(double R) const;
  // b_inf from the asymptotic volume ratio 1/2 of R^4/Z_2.
  static double volume_ratio() { return 0.5; }
  double b_inf() const;

  // Level data with ambient and intrinsic curvature taken from
  // coordinate_curvature at a generic angle.
  LevelSetData level_data(double r) const;
  // r^2 max |Ric(e_a, e_b)| over an orthonormal frame.
  double ricci_residual(double r) const;

  double A(double R) const;
  double Aprime(double R) const;
  // int_{b >= R} b^{-4} |Hess b^2 - (Lap b^2/4) g|^2
  double Q(double R) const;
  // -1/2 R int_{b >= R} b^{-6} |Hess b^2 - (Lap b^2/4) g|^2
  double monotonicity_rhs(double R) const;
  // r^{-3} int_{b=R} |grad b|
  double stokes_flux(double R) const;

 private:
  struct Radial {
    double r, e, de, dde;     // E = sqrt(1 - a^4/r^4) and r-derivatives
    double b, b1, b2, b3;     // s-derivatives of b
    double k1, k3, dk1, dk3;  // principal curvatures and s-derivatives
  };
  Radial radial(double r) const;
  // b^{-p} |Hess b^2 - (Lap b^2 / 4) g|^2 at r
  double energy_density(double r, int p) const;
  double level_integral(double R, int p) const;

  double a_;
};

}  // namespace conelab
