#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "declab/grid.hpp"
#include "declab/rational.hpp"

namespace declab {

// Finitely many frequency points with exact rational coordinates, assigned to
// disjoint sets S_1, S_2, ...; p = 2k.
struct PointMassConfig {
  std::vector<std::vector<Rational>> points;
  std::vector<int> assignment;  // set index per point
  int k = 3;

  int num_sets() const;
};

// Distinct k-fold sums collide only when forced by equal multisets. On
// violation, describes the colliding tuples.
struct GenericityViolation {
  std::vector<int> tuple_a, tuple_b;
  std::string describe() const;
};
std::optional<GenericityViolation> genericity_violation(const PointMassConfig& cfg);

// sum over attained sums s of r(s)^2 where r(s) counts ordered k-tuples
// (with repetition) from the filtered point set summing to s. Exact integer.
// Throws std::domain_error naming the collision if genericity fails.
std::uint64_t exp_sum_moment(const PointMassConfig& cfg,
                             const std::vector<int>* subset_filter = nullptr);

// Lower bound M^{1/p} / (sum_i m_i^{2/p})^{1/2} for the split decoupling
// constant, p = 2k, with M the moment of all points and m_i of set i.
struct PointMassBound {
  std::uint64_t moment_all = 0;
  std::vector<std::uint64_t> moment_per_set;
  int p = 6;

  double value() const;
  std::string expression() const;  // e.g. "93^(1/6) / (20^(1/3) + 1^(1/3))^(1/2)"
};
PointMassBound point_mass_lower_bound(const PointMassConfig& cfg);

// Sample configuration from the exact three-point computation: two points in
// S_1, one in S_2, k = 3.
PointMassConfig three_point_config();

// Random generic configuration: coordinates with large odd numerators over a
// power-of-two denominator, re-sampled on collision.
PointMassConfig random_generic_config(int num_points, int dims, int k,
                                      const std::vector<int>& assignment,
                                      std::uint64_t seed);

// Grid realization: epsilon-bumps at the points, decoupling ratio of the
// per-set projections at p = 2k. Converges to point_mass_lower_bound as
// epsilon -> 0. Throws if the bumps or their k-fold sum clusters overlap.
struct PointMassGridCheck {
  double ratio = 0.0;
  double exact = 0.0;
  double rel_gap = 0.0;
};
PointMassGridCheck point_mass_grid_check(const PointMassConfig& cfg, double epsilon,
                                         std::int64_t samples_per_axis = 2048);

}  // namespace declab
