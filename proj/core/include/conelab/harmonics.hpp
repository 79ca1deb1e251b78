#pragma once

#include "conelab/geometry.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace conelab {

// Real orthonormal spherical harmonic Y_lm on the unit sphere; m < 0 picks
// the sin branch.
Field real_harmonic(const Grid& grid, int l, int m);

// All (l, m) with 0 <= l <= lmax in order l = 0, 1, ... and m = -l..l.
std::vector<std::pair<int, int>> harmonic_indices(int lmin, int lmax);

// Band-limited random test fields.  On the sphere, tensors are pullbacks of
// polynomial ambient fields on R^3 through the embedding, so coordinate
// components behave correctly at the poles.  On the torus, low trig
// polynomials are used.
class FieldSampler {
 public:
  FieldSampler(GridPtr grid, std::uint64_t seed, int degree = 3);

  Field scalar();                 // random combination of low harmonics
  Field scalar_mean_zero();
  Tensor sym_tensor();            // lower, symmetric
  Tensor vector_up();             // upper index, metric g0 (round or flat)
  double normal() { return gauss_(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  Field ambient_poly(int deg);

  GridPtr grid_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  int degree_;
};

// Embedding S^2 -> R^3 and its chart derivatives (x, y, z fields).
struct Embedding {
  Field x[3];
  Field dth[3];
  Field dph[3];
};
Embedding unit_embedding(const Grid& grid);

// grad Y and its rotation by the area form, upper index, for the round
// metric of radius 1.
Tensor gradient_field(const Geometry& round, const Field& y);
Tensor rotated_gradient_field(const Geometry& round, const Field& y);

}  // namespace conelab
