#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace declab {

using cplx = std::complex<double>;

// One axis of a periodic grid. Spatial samples sit at
//   x_j = spatial_origin + j * (period / samples),   j = 0..samples-1,
// and the frequency lattice is
//   xi_k = (freq_offset + k) / period,               k = 0..samples-1,
// i.e. the resolvable band on this axis is [freq_offset/L, (freq_offset+N)/L).
struct Axis {
  double period = 1.0;            // L
  std::int64_t samples = 1;       // N, power of two
  std::int64_t freq_offset = 0;   // k0
  double spatial_origin = 0.0;    // x0

  double spacing() const { return period / double(samples); }
  double freq_spacing() const { return 1.0 / period; }
  double band_lo() const { return double(freq_offset) / period; }
  double band_hi() const { return double(freq_offset + samples) / period; }
  double freq(std::int64_t k) const { return double(freq_offset + k) / period; }
  double coord(std::int64_t j) const { return spatial_origin + double(j) * spacing(); }
};

struct Grid {
  std::vector<Axis> axes;

  int dims() const { return int(axes.size()); }
  std::int64_t total_samples() const;
  double cell_volume() const;
  double box_volume() const;
  std::vector<std::int64_t> shape() const;

  // Full resolvable frequency extent N/L per axis; centered-band reading of
  // the Nyquist rate is extent/2.
  double freq_extent(int a) const { return double(axes[a].samples) / axes[a].period; }

  // true iff [lo,hi) sits inside the resolvable band on every axis
  bool resolves(std::span<const double> lo, std::span<const double> hi) const;

  // wrapped displacement x-y reduced to [-L/2, L/2) per axis
  double wrapped_delta(int a, double dx) const;

  bool same_layout(const Grid& o) const;
};

// Uniform grid: every axis has the same L and N, offsets zero.
Grid make_uniform_grid(int dims, double period, std::int64_t samples);

// A mode on the frequency lattice: integer lattice index per axis (absolute,
// i.e. including the axis offset) plus a complex amplitude.
struct Mode {
  std::vector<std::int64_t> k;
  cplx coeff;
};

// Complex function on a periodic grid, stored as spatial samples and/or
// frequency coefficients with the convention
//   F(x) = sum_k c_k e(xi_k . x),   e(t) = exp(2 pi i t).
// Parseval in this normalization:
//   (1/N_tot) sum_j |F_j|^2 = sum_k |c_k|^2.
class GridFunction {
 public:
  enum class Sync { spatial_only, freq_only, both };

  GridFunction() = default;
  explicit GridFunction(Grid g);

  static GridFunction zeros(Grid g);
  static GridFunction from_modes(Grid g, std::span<const Mode> modes);
  // spatial values given by a callable of the coordinate vector
  template <class F>
  static GridFunction from_spatial(Grid g, F&& f) {
    GridFunction out(std::move(g));
    out.spatial_.assign(out.grid_.total_samples(), cplx{});
    std::vector<double> x(out.grid_.dims());
    std::vector<std::int64_t> idx(out.grid_.dims(), 0);
    for (std::int64_t lin = 0; lin < out.grid_.total_samples(); ++lin) {
      for (int a = 0; a < out.grid_.dims(); ++a) x[a] = out.grid_.axes[a].coord(idx[a]);
      out.spatial_[lin] = f(x);
      out.bump_index(idx);
    }
    out.sync_ = Sync::spatial_only;
    return out;
  }

  const Grid& grid() const { return grid_; }
  Sync sync() const { return sync_; }

  std::span<const cplx> spatial() const;
  std::span<const cplx> freq() const;
  std::span<cplx> mutable_spatial();
  std::span<cplx> mutable_freq();

  void ensure_spatial();  // inverse transform if needed
  void ensure_freq();     // forward transform if needed
  void invalidate_spatial() { sync_ = Sync::freq_only; }
  void invalidate_freq() { sync_ = Sync::spatial_only; }

  // lattice index helpers (k absolute, per-axis in [offset, offset+N))
  std::int64_t linear_index(std::span<const std::int64_t> k_abs) const;
  bool in_band(std::span<const std::int64_t> k_abs) const;
  cplx coeff_at(std::span<const std::int64_t> k_abs) const;

  // enumerate nonzero coefficients (|c| > tol)
  std::vector<Mode> nonzero_modes(double tol = 0.0) const;

  // exact trig-polynomial evaluation at an arbitrary point (O(#modes))
  cplx evaluate(std::span<const double> x) const;

  // L2 quantities in the stored normalization
  double freq_l2_sq() const;          // sum |c_k|^2
  double spatial_mean_sq() const;     // (1/N) sum |F_j|^2
  double parseval_gap() const;        // relative mismatch of the two

  // zero-pad onto a finer grid with the same periods/offsets (factor per axis)
  GridFunction resampled(std::int64_t factor) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator*=(cplx s);

  // binary dump: 16-byte magic, little-endian u32 sizes, interleaved f64
  // (re,im) frequency coefficients; grid parameters go to a JSON sidecar at
  // path + ".json"
  void save(const std::string& path) const;
  static GridFunction load(const std::string& path);

  void bump_index(std::vector<std::int64_t>& idx) const;

 private:
  Grid grid_;
  std::vector<cplx> spatial_;
  std::vector<cplx> freq_;
  Sync sync_ = Sync::both;
};

// direction of the transform applied to raw arrays (internal helper, exposed
// for tests)
void fft_nd(const Grid& g, std::vector<cplx>& data, bool forward);

}  // namespace declab
