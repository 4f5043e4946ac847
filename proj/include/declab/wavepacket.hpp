#pragma once

#include <string>

#include "declab/bump.hpp"
#include "declab/grid.hpp"
#include "declab/regions.hpp"

namespace declab {

// Spatial tube dual to a frequency cube centered at c_omega: direction
// (-2 c_omega, 1), core width R^{1/2}, length R.
struct Tube {
  std::vector<double> center_base;  // c_q in R^{n-1}
  std::vector<double> freq_center;  // c_omega in R^{n-1}
  double scale = 1.0;               // R
  double dilation = 1.0;            // M

  bool contains(std::span<const double> x) const {
    const std::size_t d = center_base.size();
    double xn = x[d];
    if (std::abs(xn) > scale) return false;
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double u = (x[a] - center_base[a]) + 2.0 * freq_center[a] * xn;
      s += u * u;
    }
    return s <= dilation * dilation * scale;
  }
};

// Samples of a function on [-support, support)^d over a uniform midpoint
// mesh; the frequency-side input of the extension operator.
struct BaseFunction {
  int dims = 1;
  int samples_per_axis = 256;
  double support = 1.0;
  std::vector<cplx> values;

  double spacing() const { return 2.0 * support / samples_per_axis; }
  std::int64_t total() const;
  std::vector<double> point(std::int64_t lin) const;

  template <class F>
  static BaseFunction sample(int dims, int samples_per_axis, double support, F&& f) {
    BaseFunction b;
    b.dims = dims;
    b.samples_per_axis = samples_per_axis;
    b.support = support;
    b.values.resize(b.total());
    for (std::int64_t i = 0; i < b.total(); ++i) b.values[i] = f(b.point(i));
    return b;
  }

  double l2_norm() const;
};

// Ef(x) = int f(xi) e(x_bar . xi + x_n |xi|^2) dxi by midpoint quadrature
// over f's mesh.
cplx extension_point(const BaseFunction& f, std::span<const double> x);

// Ef on the spatial grid (spatial representation only).
GridFunction extension_operator(const BaseFunction& f, Grid eval_grid);

struct WavePacket {
  Tube tube;
  cplx coeff;
};

enum class PacketFormulation { extension, dual_box };

struct WavePacketSet {
  PacketFormulation formulation = PacketFormulation::extension;
  double scale = 1.0;  // R
  int ambient_dims = 2;
  std::vector<WavePacket> packets;

  // dual-box bookkeeping (formulation == dual_box)
  FreqBox box;                      // padded box the tiling was built on
  std::vector<double> tile_step;    // spatial tile lattice step per axis
  double coeff_l2_sq() const;
  void export_jsonl(const std::string& path) const;
};

// --- extension formulation -------------------------------------------------
//
// Tight-frame packets: gamma_T(xi) = R^{d/4} gamma(R^{1/2}(xi - c_omega))
// e(c_q.(c_omega - xi)) and a_T = 2^{-d/2} <f, gamma_T>, so that
// sum |a_T|^2 = ||f||_2^2 and f = sum a_T 2^{-d/2} gamma_T hold together.
struct ExtensionDecomposition {
  WavePacketSet set;
  double f_l2_sq = 0.0;
  double energy_ratio = 0.0;        // sum |a_T|^2 / ||f||_2^2
  double reconstruction_rel_l2 = 0.0;
  // per-omega energy identity: worst relative gap of
  // sum_{omega_T = omega} |a_T|^2 against ||f gamma_omega||_2^2
  double per_omega_worst_gap = 0.0;
};

// q-sum truncated at |c_q| <= q_range_factor * R (coefficients beyond decay
// rapidly); the dropped mass shows up in energy_ratio.
ExtensionDecomposition wp_decompose_extension(const BaseFunction& f, double R,
                                              double q_range_factor = 10.0);

// value of the (tight-frame) packet profile phi_T = 2^{-d/2} E gamma_T
cplx packet_profile(const Tube& t, std::span<const double> x, int eta_samples = 96);

struct PacketProfileReport {
  double sup_global = 0.0;          // sup |phi_T| over the sample set
  double sup_outside = 0.0;         // sup over the same set minus M T
  // same sup restricted to |x_n| <= R/4, before the cap's angular spread
  // widens the packet beyond the nominal tube
  double sup_outside_midslab = 0.0;
  double fitted_c = 0.0;            // sup_global / R^{-d/4}
  double fitted_c_outside = 0.0;    // sup_outside / (R^{-d/4} M^{-N})
  double center_modulus = 0.0;      // |phi_T| at the tube center
};

PacketProfileReport packet_profile_check(const Tube& t, double dilation_m,
                                         int n_decay, int samples_per_axis = 48);

// --- dual-box formulation ----------------------------------------------------
//
// Tiling with frequency window 3/2 the box side per axis and the
// partition-of-unity profile; the resulting W_T family is exactly
// orthonormal on the discrete torus, so reconstruction is exact to rounding.
struct BoxDecomposition {
  WavePacketSet set;
  double reconstruction_rel_l2 = 0.0;
  double l2_ratio = 0.0;  // ||sum w_T W_T||_2^2 / ||w||_2^2
};

BoxDecomposition wp_decompose_box(const GridFunction& f, const FreqBox& box);

// rebuild sum over packets with |w_T| in [lambda, 2 lambda) (level-set slice)
GridFunction box_level_slice(const GridFunction& f, const BoxDecomposition& dec,
                             double lambda);

// materialize a single W_T as a GridFunction (unit discrete L^2 norm)
GridFunction box_packet(const Grid& g, const BoxDecomposition& dec, std::size_t index);

// rebuild sum w_T W_T from the (possibly edited) coefficients of dec
GridFunction box_rebuild(const Grid& g, const BoxDecomposition& dec);

}  // namespace declab
