#pragma once

#include "conelab/linearization.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace conelab {

// Smooth function on R^d with a critical point at 0.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
};

// |x|^2
class QuadraticModel : public Objective {
 public:
  explicit QuadraticModel(int d) : d_(d) {}
  int dim() const override { return d_; }
  double value(const Eigen::VectorXd& x) const override { return x.squaredNorm(); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return 2.0 * x; }

 private:
  int d_;
};

// |x|^4
class QuarticModel : public Objective {
 public:
  explicit QuarticModel(int d) : d_(d) {}
  int dim() const override { return d_; }
  double value(const Eigen::VectorXd& x) const override { return x.squaredNorm() * x.squaredNorm(); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return 4.0 * x.squaredNorm() * x; }

 private:
  int d_;
};

// G(c) = R(exp(sum c_i e_i)) over an orthonormal basis of tangent pairs.
// The gradient is the transpose differential of exp applied to the gradient
// of R, expressed in basis coordinates.
class SliceObjective : public Objective {
 public:
  SliceObjective(const BackgroundData& bg, VariationBasis basis);

  int dim() const override { return basis_.dim(); }
  double value(const Eigen::VectorXd& c) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const override;

  TangentPair tangent(const Eigen::VectorXd& c) const;
  // Coordinates of y; throws if y has a component outside the span above
  // tol * |y| (for instance a gauge direction against the slice basis).
  Eigen::VectorXd coordinates(const TangentPair& y, double tol = 1e-8) const;
  const VariationBasis& basis() const { return basis_; }
  const BackgroundData& background() const { return *bg_; }

 private:
  const BackgroundData* bg_;
  VariationBasis basis_;
  Eigen::MatrixXd flat_;
};

// Central-difference Jacobian of the gradient at x (step-extrapolated).
Eigen::MatrixXd gradient_jacobian(const Objective& obj, const Eigen::VectorXd& x);

// Orthonormal eigenvectors of the symmetric part of j with
// |lambda| < max(threshold * spectral radius, abs_floor).
Eigen::MatrixXd kernel_from_jacobian(const Eigen::MatrixXd& j, double threshold = 1e-4, double abs_floor = 1e-8);

// N(x) = grad G(x) + Pi_K x and its inverse Phi near 0.  Phi solves
// N(x) = y by Newton's method with the Jacobian frozen at 0.
class ReducedProblem {
 public:
  ReducedProblem(const Objective& obj, Eigen::MatrixXd kernel, double tol = 1e-12, int max_iter = 50);

  const Objective& objective() const { return *obj_; }
  const Eigen::MatrixXd& kernel() const { return k_; }
  const Eigen::MatrixXd& jacobian() const { return j0_; }
  // Smallest |eigenvalue| of dN_0 over the largest.
  double invertibility() const { return inv_; }
  double base_value() const { return g0_; }

  Eigen::VectorXd N(const Eigen::VectorXd& x) const;
  // Throws std::domain_error when Newton does not converge.
  Eigen::VectorXd phi(const Eigen::VectorXd& y, int* iterations = nullptr) const;
  // f(z) = G(Phi(K z)) on kernel coordinates.
  double f(const Eigen::VectorXd& z) const;
  Eigen::VectorXd grad_f(const Eigen::VectorXd& z) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const { return k_.transpose() * x; }

 private:
  const Objective* obj_;
  Eigen::MatrixXd k_;
  Eigen::MatrixXd j0_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double tol_;
  int max_iter_;
  double inv_ = 0.0;
  double g0_ = 0.0;
};

struct ReductionCheck {
  double phi_at_zero = 0.0;     // |Phi(0)|
  double n_of_phi = 0.0;        // max |N(Phi(y)) - y|
  double phi_of_n = 0.0;        // max |Phi(N(x)) - x|
  double lipschitz = 0.0;       // max |Phi(x) - Phi(y)| / |x - y|
  int max_iterations = 0;
  int samples = 0;
};
ReductionCheck check_reduction(const ReducedProblem& rp, double radius, int samples, std::uint64_t seed);

struct ExponentEstimate {
  double alpha_hat = 0.0;
  double constant = 0.0;   // max |G - G(0)|^{2 - alpha_hat} / |grad G|^2
  double c_grad = 0.0;     // max |grad f(Pi_K x)|^2 / |grad G(x)|^2
  double c_f = 0.0;        // max |G(x) - f(Pi_K x)| / |grad G(x)|^2
  double c_chain = 0.0;    // max |f(Pi_K x) - G(0)|^{2 - alpha_hat} / |grad G(x)|^2
  int samples = 0;
  int rays = 0;
  double r_min = 0.0, r_max = 0.0;
  std::uint64_t seed = 0;
  bool valid = false;
};

// Samples rays x radii (ten geometric radii in [radius/100, radius]).  The
// constant is fitted on the outermost shell; alpha_hat is the largest alpha
// for which every inner sample obeys the inequality with that constant.
ExponentEstimate estimate_exponent(const ReducedProblem& rp, double radius, int samples, std::uint64_t seed,
                                   int threads = 1);

struct FlowReport {
  std::vector<double> values;  // G along the iterates
  std::vector<double> distance_to_last;
  Eigen::VectorXd last;
  double step = 0.0;           // final step after halvings
  int halvings = 0;
  bool monotone = true;
  bool left_guard = false;     // stopped because the next iterate left the chart guard
  double mean_ratio = 0.0;     // geometric mean of (G_{k+1} - G*) / (G_k - G*)
};

// x <- x - step grad G(x), halving the step whenever G would increase.
// Stops early if an iterate would leave the domain of G.
FlowReport gradient_flow(const Objective& obj, const Eigen::VectorXd& x0, double step, int iters);

}  // namespace conelab
