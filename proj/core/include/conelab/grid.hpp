#pragma once

#include <Eigen/Dense>

#include <memory>

namespace conelab {

using Field = Eigen::ArrayXd;

enum class GridKind { sphere, torus };

// Structured chart grid on the cross-section.
//
// Sphere: colatitude nodes theta_j = (j + 1/2) pi / n_lat, so no node sits on
// a pole; longitude uniform with n_lon even.  theta-derivatives use the
// double Fourier extension theta -> -theta, phi -> phi + pi, under which a
// coordinate component with k theta-indices picks up (-1)^k.  Quadrature is
// Fejer's first rule in cos(theta) times the trapezoid rule in phi.
//
// Torus: square [0, 2pi)^2, Fourier in both directions.  Used only as a
// flat oracle backend.
//
// Node (i, k) is stored at i * n_lon + k.
class Grid {
 public:
  static std::shared_ptr<const Grid> sphere(int n_lat, int n_lon);
  static std::shared_ptr<const Grid> torus(int n);

  GridKind kind() const { return kind_; }
  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }
  int size() const { return n_lat_ * n_lon_; }
  int index(int i, int k) const { return i * n_lon_ + k; }

  double theta(int i) const { return theta_(i); }
  double phi(int k) const { return phi_(k); }
  const Field& theta_nodes() const { return theta_nodes_; }
  const Field& phi_nodes() const { return phi_nodes_; }

  // Per-node weight in area units of the reference chart measure
  // (sin(theta) dtheta dphi on the sphere, dx dy on the torus).
  const Field& quad_weights() const { return weights_; }
  // sin(theta) on the sphere, 1 on the torus.
  const Field& ref_density() const { return density_; }

  Field d_theta(const Field& f, int parity) const;
  Field d_phi(const Field& f) const;

  // Reference total area (4 pi or 4 pi^2).
  double reference_area() const { return weights_.sum(); }

 private:
  Grid() = default;

  GridKind kind_ = GridKind::sphere;
  int n_lat_ = 0;
  int n_lon_ = 0;
  Eigen::VectorXd theta_, phi_;
  Field theta_nodes_, phi_nodes_, weights_, density_;
  Eigen::MatrixXd d_pos_, d_neg_;  // theta blocks (d_neg_ unused on torus)
  Eigen::MatrixXd d_lon_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Periodic spectral differentiation matrix on m equispaced points of
// spacing 2 pi / m (m even).
Eigen::MatrixXd fourier_diff_matrix(int m);

// Fejer first-rule weights for integral over [0, pi] of f(theta) sin(theta).
Eigen::VectorXd fejer_weights(int n);

}  // namespace conelab
