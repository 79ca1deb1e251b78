#pragma once

#include "conelab/functionals.hpp"
#include "conelab/variation.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace conelab {

// Path (gbar + t h + t^2 h'/2, b_inf exp(t v + t^2 v')) through the base pair.
// xp carries (h', v').
PairPath second_order_path(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp);

// Second derivatives at t = 0 along second_order_path.  Evaluated on the
// base pair only; the overloads taking `at` throw if it is not the base.
double second_variation_A(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp);
double second_variation_B(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp);
double second_variation_R(const BackgroundData& bg, const TangentPair& x, const TangentPair& xp);
double second_variation_A(const BackgroundData& bg, const WeightedPair& at, const TangentPair& x,
                          const TangentPair& xp);
double second_variation_B(const BackgroundData& bg, const WeightedPair& at, const TangentPair& x,
                          const TangentPair& xp);
bool is_base_pair(const BackgroundData& bg, const WeightedPair& p, double tol = 1e-12);

// (2 - n) R'' for tangent (h, v) with h transverse traceless.  Second-order
// data is eliminated through the constraint, so this is the value along any
// path in A_1 with first-order data (h, v).  Throws if |delta h| or |Tr h|
// exceeds tol relative to |h| + |v| or if (h, v) is not tangent.
double sv_transverse_traceless(const BackgroundData& bg, const Tensor& h, const Field& v, double tol = 1e-8);
// Same integrand on any background geometry: -b int <L h, h>/(2(n-2)) - 6 b^2 v^2.
// Used with the flat torus, where it reduces to b int |nabla h|^2 / (2(n-2)).
double sv_tt_form(const Geometry& base, double b_inf, int n, const Tensor& h, const Field& v);

// (2 - n) R'' for h = phi gbar.
double sv_conformal(const BackgroundData& bg, const Field& phi, const Field& v, double tol = 1e-10);

// The symmetric block operator acting on (phi, v).
class ConformalBlock {
 public:
  explicit ConformalBlock(const BackgroundData& bg) : bg_(&bg) {}

  std::pair<Field, Field> apply(const Field& phi, const Field& v) const;
  // b_inf int <L(phi, v), (phi, v)> dmu_gbar; equals (2 - n) R''.
  double quadratic_form(const Field& phi, const Field& v) const;
  // Coefficient matrix of Delta.
  Eigen::Matrix2d symbol() const;
  double symbol_determinant() const { return symbol().determinant(); }
  // Image of the constant pair (c1, c2).
  std::pair<double, double> constant_image(double c1, double c2) const;

 private:
  const BackgroundData* bg_;
};

// Vector fields grad Y_lm and *grad Y_lm (upper index, unit round metric),
// l in [lmin, lmax].
struct VectorMode {
  Tensor v;
  int l = 0;
  int m = 0;
  bool rotated = false;
};
std::vector<VectorMode> vector_modes(const BackgroundData& bg, int lmin, int lmax);

// h = h_tt + phi gbar + (L_V gbar)_0 with all three parts L^2-orthogonal
// (the subscript 0 is the trace-free part).  Equivalently
// h = h_tt + phi_lie gbar + L_V gbar with phi_lie = phi - 2 div V/(n-1).
// V is the minimum-norm least-squares fit over vector_modes(1, lmax), so
// Killing and conformal Killing parts of V are zero.
struct YorkParts {
  Tensor tt;
  Field phi;
  Field phi_lie;
  Tensor conformal;  // phi gbar
  Tensor gauge;      // (L_V gbar)_0
  Tensor v_up;
  double divergence_residual = 0.0;  // |delta h_tt| / |h|
  double trace_residual = 0.0;       // |Tr h_tt| / |h|
};
YorkParts york_decompose(const Tensor& h, const BackgroundData& bg, int lmax = 10, double tol = 1e-8);

// Flattening with dot(flatten(x), flatten(y)) = l2_inner(x, y).  Requires a
// diagonal gbar.
Eigen::VectorXd flatten(const BackgroundData& bg, const TangentPair& x);

enum class BasisLabel { tt, conformal, diffeo };
const char* label_name(BasisLabel l);

struct VariationBasis {
  std::vector<TangentPair> elems;
  std::vector<BasisLabel> labels;
  std::vector<Tensor> fields;  // V for diffeo elements, empty otherwise
  Eigen::MatrixXd gram;

  int dim() const { return static_cast<int>(elems.size()); }
  int count(BasisLabel l) const;
  // Largest |<e_i, grad A_1 at base>| / |grad A_1|.
  double max_constraint_residual(const BackgroundData& bg) const;
};

// Orthonormal basis of {L_V gbar} + {(phi gbar, v)} cut off at degree L,
// diffeo part first.  Every element is tangent to A_1 at the base.  The TT
// block is empty on the round S^2.
VariationBasis structure_basis(const BackgroundData& bg, int L, double drop_tol = 1e-8);
// Orthonormal basis of divergence-free tangent pairs (h, v) of degree <= L.
// On the round S^2 these are h = (Y g0 + Hess Y / (l(l+1) - 1)) / b_inf^2.
VariationBasis slice_basis(const BackgroundData& bg, int L, double drop_tol = 1e-8);

struct OperatorMatrix {
  Eigen::MatrixXd m;
  std::vector<BasisLabel> labels;

  double norm() const { return m.norm(); }
  double symmetry_defect() const;  // |M - M^T| / |M|
  // Largest column/row norm over elements with label l, relative to |M|.
  double label_block_norm(BasisLabel l) const;
  // |M restricted to rows a, cols b| / |M|.
  double cross_block_norm(BasisLabel a, BasisLabel b) const;
  void write_csv(std::ostream& os) const;
};

// d/dt grad_1 R(exp(t x)) at t = 0, step-extrapolated.
TangentPair linearized_gradient(const BackgroundData& bg, const TangentPair& x);

// M_ij = <e_i, L e_j> with columns from linearized_gradient.  Columns are
// split over `threads` workers.
OperatorMatrix assemble_L(const VariationBasis& basis, const BackgroundData& bg, int threads = 1);

struct KernelResult {
  Eigen::VectorXd eigenvalues;   // of the restricted matrix, ascending
  Eigen::MatrixXd vectors;       // kernel vectors in full basis coordinates (columns)
  std::vector<int> restricted;   // basis indices kept
  double spectral_radius = 0.0;
  int dim() const { return static_cast<int>(vectors.cols()); }
};

// Eigenvectors with |lambda| <= threshold * spectral radius of the matrix
// restricted to non-diffeo elements.
KernelResult kernel_of_L(const OperatorMatrix& m, double threshold = 1e-4);

}  // namespace conelab
