#pragma once

#include "conelab/functionals.hpp"

#include <functional>

namespace conelab {

// First-order changes along g + t h (and u + t v).  All expressions are
// written covariantly in chart components with indices raised by g.
Tensor dmetric_inverse(const Geometry& geo, const Tensor& h);  // upper
Field dnorm_gradient(const Geometry& geo, const Tensor& h, const Field& u, const Field& v);
Field dvolume_form(const Geometry& geo, const Tensor& h);  // factor multiplying dmu
Field dscalar_curvature(const Geometry& geo, const Tensor& h);
Tensor dricci(const Geometry& geo, const Tensor& h);
Tensor dhessian(const Geometry& geo, const Tensor& h, const Field& u, const Field& v);

// A one-parameter family t -> (g_t, w_t) that is supposed to lie in A_1.
using PairPath = std::function<WeightedPair(double)>;

struct ConstraintResidual {
  double first = 0.0;
  double second = 0.0;
  double path_drift = 0.0;  // max |A_1(t) - Vol| / Vol over sampled t
};

// Recovers h = g'(0), h' = g''(0), v = s'(0), v' = s''(0)/2 with
// s = log(w / b_inf) by finite differences in t and evaluates both integral
// constraints at the base.  Throws if a sampled point leaves A_1.
ConstraintResidual constraint_derivatives(const PairPath& path, const BackgroundData& bg);

// Second-order data of a path at t = 0 recovered by finite differences.
struct PathJet {
  Tensor h, hp;
  Field v, vp;
};
PathJet path_jet(const PairPath& path, const BackgroundData& bg);

}  // namespace conelab
