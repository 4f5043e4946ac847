#pragma once

#include <string>
#include <vector>

#include "declab/grid.hpp"
#include "declab/rng.hpp"

namespace declab {

// Congruent R^{1/2} x ... x R slab/tube: center, unit direction of the long
// axis, nonnegative weight.
struct FatTube {
  std::vector<double> center;
  std::vector<double> direction;  // unit
  double scale = 1.0;             // R: length R, short sides R^{1/2}
  double weight = 1.0;
};

struct TubeFamily {
  int ambient_dim = 2;
  double scale = 1.0;
  std::vector<FatTube> tubes;

  void export_csv(const std::string& path) const;
  static TubeFamily import_csv(const std::string& path);
};

// Minimum wedge-determinant magnitude of unit normals over all corner tuples
// of the paraboloid graph above the given base cubes.
struct TransversalityCert {
  double nu = 0.0;
  std::vector<std::vector<double>> witness_points;  // base points realizing nu
};

struct BaseCube {
  std::vector<double> lo, hi;
};

TransversalityCert transversality(std::span<const BaseCube> caps, int ambient_dim);

// unit normal of the paraboloid graph at base point xi
std::vector<double> paraboloid_normal(std::span<const double> xi);

// minimum |nu_1 ^ nu_2| over cross pairs of two direction families
double min_cross_wedge(const TubeFamily& a, const TubeFamily& b);

// (int h1 h2) / (R^{-2} prod int h_i) with h_i = sum c_T 1_T, every integral
// by exact rectangle-intersection geometry. Requires ambient dimension 2 and
// all cross pairs nu-transverse (>= nu_min); throws otherwise.
double bilinear_kakeya_ratio(const TubeFamily& t1, const TubeFamily& t2, double R,
                             double nu_min = 0.5);

// || prod_j (sum 1_{T_j}) ||_{L^{q/n}} / ( R^{n^2/(2q)} prod |T_j| ) by grid
// quadrature at resolution >= cells_per_short * cells per R^{1/2}.
double multilinear_kakeya_ratio(std::span<const TubeFamily> families, double R, double q,
                                double nu_min = 0.5, int cells_per_short = 4);

// area of the intersection of two convex polygons (Sutherland-Hodgman)
double convex_intersection_area(std::span<const std::array<double, 2>> poly_a,
                                std::span<const std::array<double, 2>> poly_b);

std::vector<std::array<double, 2>> tube_corners(const FatTube& t);

// Ball inflation functional: both sides of the spatial-scale-doubling
// inequality at p = 2q over Q of side delta^{-2} split into Delta of side
// delta^{-1}; returns LHS/RHS plus the pieces.
struct BallInflationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
};

BallInflationReport ball_inflation_check(const GridFunction& f, double delta, double q,
                                         double i1_lo, double i1_hi, double i2_lo,
                                         double i2_hi);

// random transverse family generator for the Monte-Carlo suites
TubeFamily random_transverse_family(int ambient_dim, double R, int count,
                                    double angle_center, double angle_spread, Rng& rng);

}  // namespace declab
