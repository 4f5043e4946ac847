#pragma once

#include <optional>
#include <variant>

#include "declab/grid.hpp"
#include "declab/norms.hpp"
#include "declab/regions.hpp"
#include "declab/rng.hpp"

namespace declab {

// Partition the quotient is taken against: either the cap partition of the
// paraboloid neighborhood or an explicit list of disjoint regions.
using DecouplingPartition = std::variant<CapPartition, std::vector<FrequencyRegion>>;

enum class RatioNormKind { global_period, local, weighted };

struct DecouplingInstance {
  GridFunction f;
  DecouplingPartition partition;
  double p = 2.0;
  RatioNormKind kind = RatioNormKind::global_period;
  // window for local/weighted kinds; default cube of side delta^{-1} at the
  // origin is filled in by make_instance when a CapPartition is used
  std::optional<SpatialBox> window;
};

// number of pieces and per-piece coefficient extraction
std::size_t partition_size(const DecouplingPartition& part);
std::vector<Mode> piece_modes(const GridFunction& f, const DecouplingPartition& part,
                              std::size_t i);

// || F ||_p / ( sum_theta || P_theta F ||_p^2 )^{1/2} with both norms of the
// selected kind. Throws std::domain_error for F = 0 or support escaping the
// partition. Piece norms run on modulated subgrids sized to each piece.
double decoupling_ratio(const DecouplingInstance& inst, int piece_oversample = 0);

// same quotient with the pieces given explicitly as mode lists (global-period
// norms); used for transported partitions and multi-stage splits
double decoupling_ratio_from_pieces(const Grid& g,
                                    std::span<const std::vector<Mode>> pieces,
                                    double p, int piece_oversample = 0);

// Ratio with the self-convergence gate applied to numerator and pieces.
struct GatedRatio {
  double ratio = 0.0;
  double numer_rel_change = 0.0;
  double denom_rel_change = 0.0;
  bool accepted = false;
};
GatedRatio decoupling_ratio_gated(const DecouplingInstance& inst);

// Grid for the standard experiment frame at scale delta: periods 4/delta,
// base axes span [0,1), vertical axis [0,2), spatial window centered at 0.
Grid paraboloid_grid(double delta, int n_dims);

// The resonant lower-bound witness: F_hat = sum over caps of the tensor bump
// scaled into the sheared cap. Real nonnegative coefficients, peak at x = 0.
GridFunction sharp_example(double delta, int n_dims);

// per-cap complex multipliers applied on top of sharp_example coefficients
GridFunction modulated_sharp_example(double delta, int n_dims,
                                     std::span<const cplx> cap_multipliers);

// Numerator quadrature used for large-p sharp-example sweeps: coarse grid sum
// with the cells around the origin replaced by a refined panel evaluated by
// direct mode summation.
struct SharpRatioResult {
  double delta = 0.0;
  double p = 0.0;
  double ratio = 0.0;
  double numer_coarse = 0.0;
  double numer_refined = 0.0;
  double panel_rel_change = 0.0;  // refinement halving check on the panel
};
SharpRatioResult sharp_example_ratio(double delta, double p, int n_dims);

// least-squares slope of log(ratio) against log(1/delta)
double fit_log_slope(std::span<const double> deltas, std::span<const double> ratios);

enum class SearchStrategy { sharp_seed, single_cap, random_coeffs, coordinate_ascent, all };

struct LowerBoundWitness {
  double value = 0.0;
  std::string generator;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double p = 0.0;
  int n_dims = 2;
  std::vector<cplx> cap_multipliers;  // certificate: multipliers over sharp_example

  double replay() const;  // re-evaluates the certificate
};

LowerBoundWitness search_lower_bound(double delta, double p, int n_dims,
                                     SearchStrategy strategy, int budget,
                                     std::uint64_t seed);

// Bilinear quotient: || |F1 F2|^{1/2} ||_p over the product of per-interval
// square sums to the 1/4. F_i must have support in N_{I_i}(4^{-scale_n}) with
// I1 = [0, 1/4], I2 = [1/2, 1].
double bilinear_ratio(const GridFunction& f1, const GridFunction& f2, int scale_n,
                      double p);

// Case split over K cells: either the mass concentrates near the largest
// entry or two non-neighboring entries are both large.
struct BroadNarrowSplit {
  enum class Case { concentrated, bilinear } kind = Case::concentrated;
  int alpha_star = 0;
  int pair_first = -1, pair_second = -1;
  double lhs = 0.0;      // |sum z|
  double bound = 0.0;    // 4 max |z| or K^{3/2} max |z' z''|^{1/2}
  bool holds = false;
};
BroadNarrowSplit broad_narrow_split(std::span<const cplx> z);

}  // namespace declab
