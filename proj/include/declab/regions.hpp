#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "declab/grid.hpp"

namespace declab {

// Axis-aligned half-open frequency box [lo, hi).
struct FreqBox {
  std::vector<double> lo, hi;
  std::string id;

  bool contains(std::span<const double> xi, double eps = 0.0) const;
  double volume() const;
};

struct FrequencyRegion {
  std::vector<FreqBox> boxes;

  bool contains(std::span<const double> xi, double eps = 0.0) const;
  bool pairwise_disjoint() const;
  // enclosing box corners over all boxes
  std::vector<double> lo() const;
  std::vector<double> hi() const;
};

// One cap of the partition of the vertical delta-neighborhood of the
// paraboloid: base cube tau (half-open) in the first n-1 coordinates, sheared
// slab 0 <= xi_n - |xi_bar|^2 < delta above it. The axis-aligned hull box is
// kept alongside (its height exceeds the slab thickness; padding_factor
// records hull measure / cap measure).
struct Cap {
  std::vector<double> tau_lo, tau_hi;
  double delta = 1.0;
  int index = 0;
  FreqBox hull;

  bool contains(std::span<const double> xi) const;
  std::vector<double> base_center() const;
  double padding_factor() const;
};

struct CapPartition {
  double delta = 1.0;
  int n_dims = 2;
  std::vector<double> base_lo;  // corner of the base domain, one per base axis
  std::vector<Cap> caps;

  std::size_t count() const { return caps.size(); }
};

// Partition of N(delta) over the base cube [base_lo, base_lo+1)^{n-1} into
// caps over dyadic delta^{1/2}-subcubes. delta must be 4^{-k}. Throws
// std::invalid_argument otherwise.
CapPartition cap_partition(double delta, int n_dims, double base_lo = 0.0);

// Expected cap count delta^{-(n-1)/2} for dyadic delta.
std::int64_t expected_cap_count(double delta, int n_dims);

// Invertible affine map xi -> A xi + v on frequency space.
struct AffineFreqMap {
  std::vector<std::vector<double>> mat;
  std::vector<double> shift;

  int dims() const { return int(shift.size()); }
  std::vector<double> apply(std::span<const double> xi) const;
  AffineFreqMap inverse() const;
  double det() const;
  FreqBox apply_box(const FreqBox& b) const;  // hull of the image (requires axis-aligned image for exactness)
};

AffineFreqMap identity_map(int dims);
AffineFreqMap translation_map(std::span<const double> v);
// dilation by a scalar per axis
AffineFreqMap dilation_map(std::span<const double> scale);
// unit shear: xi_n += m . xi_bar (integer row vector m over the base axes)
AffineFreqMap vertical_shear_map(int dims, std::span<const std::int64_t> m);

// Parabolic rescaling map centered at c with parameter sigma (sigma = 4^{-m}):
//   xi_bar -> (xi_bar - c)/sqrt(sigma),  xi_n -> (xi_n - 2 xi_bar.c + |c|^2)/sigma.
// Maps the paraboloid graph to itself. sigma outside (0,1] rejected.
AffineFreqMap parabolic_map(std::span<const double> c, double sigma);

// Fourier projection onto a region: coefficients kept inside, zeroed outside.
GridFunction project(const GridFunction& f, const FrequencyRegion& region);
GridFunction project(const GridFunction& f, const Cap& cap);
// general predicate projection
GridFunction project_if(const GridFunction& f,
                        const std::function<bool(std::span<const double>)>& keep);

// Transport of coefficients under T in the density convention: the
// coefficient at lattice point k moves to lattice point T(k) and is scaled by
// |det A|, which realizes (F_hat o T^{-1}) as a density. Every image point
// must land on the lattice of target (within 1e-9 of a lattice point) or a
// std::domain_error is thrown. For |det A| = 1 the coefficient multiset is
// preserved exactly.
GridFunction apply_affine_freq(const GridFunction& f, const AffineFreqMap& t,
                               const Grid& target);

}  // namespace declab
