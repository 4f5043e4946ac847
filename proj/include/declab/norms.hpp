#pragma once

#include <optional>
#include <variant>

#include "declab/grid.hpp"

namespace declab {

struct AllPeriod {};

struct SpatialBox {
  std::vector<double> center;
  std::vector<double> half_side;
};

struct SpatialBall {
  std::vector<double> center;
  double radius = 1.0;
};

using SpatialRegion = std::variant<AllPeriod, SpatialBox, SpatialBall>;

SpatialBox cube_at_origin(int dims, double side);
double region_volume(const Grid& g, const SpatialRegion& r);
bool region_contains(const Grid& g, const SpatialRegion& r, std::span<const double> x);

// Window weight (1 + dist(x, window)/R)^{-exponent}: identically 1 on the
// window, decaying with the polynomial rate 100n outside. Distances are taken
// in the wrapped (min-image) metric of the period box so the periodic model
// stands in for the whole space. The literal center-based profile
// (1 + |x-c|/R)^{-100n} is numerically a point spike (6e-36 at the window's
// own corner), which turns weighted averages into point evaluations; the
// window-distance profile keeps the same tail rate, the value 1 at the
// center, and radial monotonicity.
struct WeightSpec {
  enum class Shape { cube, ball };
  std::vector<double> center;
  double radius = 1.0;  // side for cubes, radius for balls
  double exponent = 200.0;
  Shape shape = Shape::cube;

  static WeightSpec for_cube(std::span<const double> center, double side, int n_dims);
  static WeightSpec for_ball(std::span<const double> center, double radius, int n_dims);
  double value(const Grid& g, std::span<const double> x) const;
};

enum class NormKind { local, weighted, local_avg, weighted_avg };

// Riemann-sum L^p norms of the four kinds over the grid. p = infinity is the
// grid maximum over the region. oversample > 1 evaluates on a zero-padded
// finer grid.
double lp_norm(const GridFunction& f, const SpatialRegion& region, double p,
               NormKind kind, const WeightSpec* w = nullptr, int oversample = 1);

// both representations exact on the lattice: <F, G> = vol * sum c_F conj(c_G)
cplx inner_product(const GridFunction& f, const GridFunction& g);

// || F ||_p over the full period computed from the function's modes alone on
// a minimal modulated subgrid (same periods, band shrunk to the mode hull).
// Exact for the alias-free p; quadrature-accurate otherwise. oversample
// multiplies the subgrid resolution beyond the mode extent.
double lp_norm_modes(const Grid& g, std::span<const Mode> modes, double p,
                     int oversample = 4, const SpatialRegion* region = nullptr,
                     NormKind kind = NormKind::local, const WeightSpec* w = nullptr);

// Norm with the grid-doubling self-convergence gate: value on the stored grid
// and on the 2x-refined grid, plus the relative change.
struct GatedNorm {
  double coarse = 0.0;
  double fine = 0.0;
  double rel_change = 0.0;
  bool accepted = false;  // rel_change < 0.5%
};
GatedNorm lp_norm_gated(const GridFunction& f, const SpatialRegion& region, double p,
                        NormKind kind, const WeightSpec* w = nullptr);

// Empirical constants for the weight inequalities under subdivision of a cube
// Q into factor^n congruent subcubes:
//   chain_upper:  sup_x sum_{Q'} w_{Q'}(x) / w_Q(x)
//   cover_min:    min_{x in Q} sum_{Q'} w_{Q'}(x)    (lower half of the chain)
//   ball_upper:   same as chain_upper for inscribed-ball weights
//   overlap_sup:  sup_x sum_{translated same-size cubes} w(x)
struct WeightReport {
  double chain_upper = 0.0;
  double cover_min = 0.0;
  double ball_upper = 0.0;
  double overlap_sup = 0.0;
};
WeightReport check_weight_inequalities(int n_dims, std::span<const double> q_center,
                                       double q_side, int factor,
                                       int samples_per_axis = 48);

// Reverse Hoelder: for F with Fourier support of diameter <= 1/R and a cube
// of side R, the constant || F ||_{L^q_#(Delta)} / || F ||_{L^p_#(w_Delta)}.
double reverse_holder_constant(const GridFunction& f, std::span<const double> center,
                               double side, double q, double p);

}  // namespace declab
