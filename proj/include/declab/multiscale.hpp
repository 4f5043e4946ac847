#pragma once

#include <array>
#include <optional>
#include <variant>

#include "declab/grid.hpp"
#include "declab/rational.hpp"
#include "declab/rng.hpp"
#include "declab/wavepacket.hpp"

namespace declab {

// --- the averaged bilinear quantity -----------------------------------------

// Pair of functions with supports in the neighborhoods over I1 = [0,1/4] and
// I2 = [1/2,1] at vertical scale 4^{-freq_scale}.
struct BilinearPair {
  GridFunction f1, f2;
  int freq_scale = 3;
};

BilinearPair random_bilinear_pair(int freq_scale, int modes_per_column,
                                  std::uint64_t seed);

// M_{p,q}(r, sigma): average over side-2^r subcubes of the side-2^R cube at
// the origin of the bilinear product of per-interval weighted L^q_# square
// sums, intervals of length 2^{-sigma}.
double compute_M(const BilinearPair& pair, double p, double q, int r, int sigma,
                 int big_r, int strip_oversample = 2);

struct LemmaReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs / rhs
};

// q1 <= q2: M_{p,q1}(r,sigma) <= C M_{p,q2}(r,sigma)
LemmaReport check_H1(const BilinearPair& pair, double p, double q1, double q2, int r,
                     int sigma, int big_r);
// 1/q = alpha/q1 + (1-alpha)/q2: M_{p,q} <= M_{p,q1}^alpha M_{p,q2}^{1-alpha}
LemmaReport check_H2(const BilinearPair& pair, double p, double q1, double q2,
                     double alpha, int r, int sigma, int big_r);
// sigma <= r: M_{p,2}(r,sigma) <= C M_{p,2}(r,r)
LemmaReport check_O(const BilinearPair& pair, double p, int r, int sigma, int big_r);
// p >= 4, R = 2r, m <= r:
//   M_{p,2}(m,m) <= C 2^{m eps} M_{p,2}(2m,2m)^{1-kappa} M_{p,p}(2r,m)^{kappa}
LemmaReport two_scale_check(const BilinearPair& pair, double p, int m, int r,
                            double eps = 0.1);

// || |F1 F2|^{1/2} ||_{L^p_#(Q^{2n})} <= C 2^{n/2^{s+1}} M_{p,2}(n/2^s, n/2^s)
LemmaReport bilinear_vs_M_check(const BilinearPair& pair, double p, int n_scale, int s);

// kappa_p = (p-4)/(p-2), exact
Rational kappa_exact(const Rational& p);

// product prod_{l=1}^s D_l^{kappa (1-kappa)^{s-l}} of supplied per-scale
// constants (pure arithmetic)
double multiscale_iterate(double p, int s, std::span<const double> d_values);

// --- exponent calculators ----------------------------------------------------

enum class PRegime {
  subcritical,
  lower_critical,
  intermediate,
  upper_critical,
  supercritical
};

struct ExponentLedger {
  int n = 2;
  Rational p;
  Rational kappa_p;
  Rational A, B;          // 1/((n-1)p) - 1/(np)  and  1/(2n) - 1/((n-1)p)
  Rational C0, sigma0;
  PRegime regime = PRegime::upper_critical;
  bool supported = true;  // false below p = 2n/(n-1)

  std::string regime_name() const;
  std::string to_json() const;  // rationals as {num, den}
};

ExponentLedger bootstrap_ch5(int n, const Rational& p);

// Exponent descent at the critical index of the planar case. The iteration
// runs the map A -> min_{s <= s_max} [ A (1 - (s+2)/2^{s+1}) + 1/2^{s-1} ]
// from A = 1/2; its floor at finite s_max is the exact fixed point
// 4/(s_max+2), and the certified limit over unbounded s is 0, which is the
// returned sigma0.
struct Ch3Bootstrap {
  std::vector<double> trace;               // iterates, monotone decreasing
  std::vector<Rational> per_s_fixed_point; // 4/(s+2) for s = 1..s_max
  Rational floor_at_smax;
  Rational sigma0;                          // exact 0 (limit certificate)
  int s_max = 12;
  int first_descending_s = 0;               // smallest s with f_s(1/2) < 1/2
};

Ch3Bootstrap bootstrap_ch3(int s_max = 12);

void export_bootstrap_csv(const Ch3Bootstrap& b, const std::string& path);

// --- pigeonholing and the per-scale relations --------------------------------

struct PacketView {
  int side = 0;
  std::int64_t cap = 0;
  std::int64_t cell = 0;
  double mag = 0.0;
};

struct SideRecord {
  double h = 0.0;      // dyadic weight band floor
  double u = 0.0;      // tubes per cap in the chosen band
  double m = 0.0;      // caps in the chosen band
  double beta = 0.0;   // m / per-cube incidence count
};

struct PigeonholeBuckets {
  int scale_index = 1;
  std::vector<SideRecord> sides;
  std::vector<std::int64_t> surviving_cells;
  double discarded_fraction = 0.0;
  double conservation_gap = 0.0;  // stage-3 partition identity residual
  std::int64_t bucket_count = 0;  // occupied (weight, per-cap, per-cube) classes
};

// Dyadic pigeonholing of packet views: per side pick the dominant weight
// band, then the dominant per-cap count band, then classify cells by their
// per-side incidence bands and keep the dominant class. Contribution of a
// cell is prod_j (sum of |w|^2 over incident packets)^{p/(2 n_sides)}.
PigeonholeBuckets pigeonhole_packets(std::span<const PacketView> views, int n_sides,
                                     std::int64_t cell_count, double p,
                                     int scale_index = 1);

// adapter: cap = omega-lattice index of the packet, cell = index of the
// side-cell_side cube containing the tube center
std::vector<PacketView> packet_views(const WavePacketSet& set, int side,
                                     double cell_side, double domain_half,
                                     std::int64_t* cell_count);

// --- synthetic multiscale traces ---------------------------------------------

struct TraceScale {
  double m = 1, u = 1, beta = 1, h = 1;  // identical across sides
  double cubes_star = 1, cubes_star2 = 1;
};

struct MultiscaleTrace {
  int n = 2;
  double big_r = 256.0;
  double p = 6.0;
  int s = 3;
  std::vector<TraceScale> scales;  // index k-1 for scale k = 1..s
};

enum class TraceKind { flat, sharp_counts, random, adversarial };

MultiscaleTrace synthetic_trace(int n, double big_r, double p, TraceKind kind,
                                std::uint64_t seed);

struct RelationReport {
  std::vector<double> r1_constants;  // per scale
  std::vector<double> r2_constants;
  std::vector<double> r3_constants;
  double worst = 0.0;
};

RelationReport verify_r1_r2_r3(const MultiscaleTrace& trace);

// --- good scale search ---------------------------------------------------------

// y_l given as exact exponents of R: y_l = R^{g_l}. A scale k is good when
//   g_k A - B sum_{l>k} g_l <= (C0 + eps) 2^{-k}.
struct GoodScale {
  int k = 0;
};
struct GoodScaleRefutation {
  Rational g1_lower_bound;     // forced exponent of y_1
  Rational series_closed_form; // (C0+eps) 2^{-2}/A [2 + (B/A) sum ((1+B/A)/2)^j]
  Rational ceiling;            // n(n-1)/2
  bool contradiction = false;  // g1_lower_bound > ceiling
};
using GoodScaleResult = std::variant<GoodScale, GoodScaleRefutation>;

GoodScaleResult good_scale_search(std::span<const Rational> y_exponents,
                                  const Rational& a, const Rational& b,
                                  const Rational& c0, const Rational& eps, int n);

// adversarial exponents saturating the violation recursion
std::vector<Rational> adversarial_y_exponents(int s, const Rational& a,
                                              const Rational& b, const Rational& c0,
                                              const Rational& eps);

}  // namespace declab
