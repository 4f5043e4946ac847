#include "declab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "json.hpp"

namespace declab {

namespace {

constexpr double kTau = 6.28318530717958647692;

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// e(t) with t reduced mod 1 first, so large integer-ish phases stay accurate
cplx unit_phase(double t) {
  double r = t - std::floor(t);
  return {std::cos(kTau * r), std::sin(kTau * r)};
}

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<std::vector<int>, bool>, fftw_plan> plans;

  fftw_plan get(const std::vector<int>& dims, bool forward, cplx* data) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dims, forward);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_plan p = fftw_plan_dft(
        int(dims.size()), dims.data(), reinterpret_cast<fftw_complex*>(data),
        reinterpret_cast<fftw_complex*>(data),
        forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

std::int64_t Grid::total_samples() const {
  std::int64_t n = 1;
  for (const auto& ax : axes) n *= ax.samples;
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes) v *= ax.spacing();
  return v;
}

double Grid::box_volume() const {
  double v = 1.0;
  for (const auto& ax : axes) v *= ax.period;
  return v;
}

std::vector<std::int64_t> Grid::shape() const {
  std::vector<std::int64_t> s;
  for (const auto& ax : axes) s.push_back(ax.samples);
  return s;
}

bool Grid::resolves(std::span<const double> lo, std::span<const double> hi) const {
  if (int(lo.size()) != dims() || int(hi.size()) != dims()) return false;
  for (int a = 0; a < dims(); ++a) {
    double eps = 0.5 * axes[a].freq_spacing();
    if (lo[a] < axes[a].band_lo() - eps) return false;
    if (hi[a] > axes[a].band_hi() + eps) return false;
  }
  return true;
}

double Grid::wrapped_delta(int a, double dx) const {
  double L = axes[a].period;
  double r = std::remainder(dx, L);
  return r;
}

bool Grid::same_layout(const Grid& o) const {
  if (dims() != o.dims()) return false;
  for (int a = 0; a < dims(); ++a) {
    if (axes[a].period != o.axes[a].period || axes[a].samples != o.axes[a].samples ||
        axes[a].freq_offset != o.axes[a].freq_offset ||
        axes[a].spatial_origin != o.axes[a].spatial_origin)
      return false;
  }
  return true;
}

Grid make_uniform_grid(int dims, double period, std::int64_t samples) {
  Grid g;
  g.axes.assign(dims, Axis{period, samples, 0, 0.0});
  return g;
}

GridFunction::GridFunction(Grid g) : grid_(std::move(g)) {
  for (const auto& ax : grid_.axes) {
    if (!is_pow2(ax.samples)) throw std::invalid_argument("samples per axis must be a power of two");
    if (!(ax.period > 0)) throw std::invalid_argument("period must be positive");
  }
}

GridFunction GridFunction::zeros(Grid g) {
  GridFunction f(std::move(g));
  f.freq_.assign(f.grid_.total_samples(), cplx{});
  f.spatial_.assign(f.grid_.total_samples(), cplx{});
  f.sync_ = Sync::both;
  return f;
}

GridFunction GridFunction::from_modes(Grid g, std::span<const Mode> modes) {
  GridFunction f(std::move(g));
  f.freq_.assign(f.grid_.total_samples(), cplx{});
  for (const auto& m : modes) {
    if (!f.in_band(m.k)) throw std::out_of_range("mode outside resolvable band");
    f.freq_[f.linear_index(m.k)] += m.coeff;
  }
  f.sync_ = Sync::freq_only;
  return f;
}

std::span<const cplx> GridFunction::spatial() const {
  if (sync_ == Sync::freq_only) throw std::logic_error("spatial values not current");
  return spatial_;
}

std::span<const cplx> GridFunction::freq() const {
  if (sync_ == Sync::spatial_only) throw std::logic_error("freq coefficients not current");
  return freq_;
}

std::span<cplx> GridFunction::mutable_spatial() {
  ensure_spatial();
  sync_ = Sync::spatial_only;
  return spatial_;
}

std::span<cplx> GridFunction::mutable_freq() {
  ensure_freq();
  sync_ = Sync::freq_only;
  return freq_;
}

std::int64_t GridFunction::linear_index(std::span<const std::int64_t> k_abs) const {
  std::int64_t lin = 0;
  for (int a = 0; a < grid_.dims(); ++a) {
    std::int64_t rel = k_abs[a] - grid_.axes[a].freq_offset;
    lin = lin * grid_.axes[a].samples + rel;
  }
  return lin;
}

bool GridFunction::in_band(std::span<const std::int64_t> k_abs) const {
  if (int(k_abs.size()) != grid_.dims()) return false;
  for (int a = 0; a < grid_.dims(); ++a) {
    std::int64_t rel = k_abs[a] - grid_.axes[a].freq_offset;
    if (rel < 0 || rel >= grid_.axes[a].samples) return false;
  }
  return true;
}

cplx GridFunction::coeff_at(std::span<const std::int64_t> k_abs) const {
  if (!in_band(k_abs)) return cplx{};
  return freq()[linear_index(k_abs)];
}

void GridFunction::bump_index(std::vector<std::int64_t>& idx) const {
  for (int a = grid_.dims() - 1; a >= 0; --a) {
    if (++idx[a] < grid_.axes[a].samples) return;
    idx[a] = 0;
  }
}

std::vector<Mode> GridFunction::nonzero_modes(double tol) const {
  const_cast<GridFunction*>(this)->ensure_freq();
  std::vector<Mode> out;
  std::vector<std::int64_t> idx(grid_.dims(), 0);
  for (std::int64_t lin = 0; lin < grid_.total_samples(); ++lin) {
    if (std::abs(freq_[lin]) > tol) {
      Mode m;
      m.k.resize(grid_.dims());
      for (int a = 0; a < grid_.dims(); ++a) m.k[a] = idx[a] + grid_.axes[a].freq_offset;
      m.coeff = freq_[lin];
      out.push_back(std::move(m));
    }
    bump_index(idx);
  }
  return out;
}

cplx GridFunction::evaluate(std::span<const double> x) const {
  const_cast<GridFunction*>(this)->ensure_freq();
  cplx acc{};
  std::vector<std::int64_t> idx(grid_.dims(), 0);
  for (std::int64_t lin = 0; lin < grid_.total_samples(); ++lin) {
    if (freq_[lin] != cplx{}) {
      double phase = 0.0;
      for (int a = 0; a < grid_.dims(); ++a)
        phase += grid_.axes[a].freq(idx[a]) * x[a];
      acc += freq_[lin] * unit_phase(phase);
    }
    bump_index(idx);
  }
  return acc;
}

double GridFunction::freq_l2_sq() const {
  const_cast<GridFunction*>(this)->ensure_freq();
  double s = 0.0;
  for (const auto& c : freq_) s += std::norm(c);
  return s;
}

double GridFunction::spatial_mean_sq() const {
  const_cast<GridFunction*>(this)->ensure_spatial();
  double s = 0.0;
  for (const auto& v : spatial_) s += std::norm(v);
  return s / double(grid_.total_samples());
}

double GridFunction::parseval_gap() const {
  double a = freq_l2_sq(), b = spatial_mean_sq();
  double den = std::max(a, b);
  if (den == 0.0) return 0.0;
  return std::abs(a - b) / den;
}

namespace {

// Apply the per-axis separable phase tables to data (multiply), tables[a] has
// length N_a.
void apply_separable(const Grid& g, std::vector<cplx>& data,
                     const std::vector<std::vector<cplx>>& tables) {
  std::vector<std::int64_t> idx(g.dims(), 0);
  const std::int64_t n = g.total_samples();
  for (std::int64_t lin = 0; lin < n; ++lin) {
    cplx ph{1.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) ph *= tables[a][idx[a]];
    data[lin] *= ph;
    for (int a = g.dims() - 1; a >= 0; --a) {
      if (++idx[a] < g.axes[a].samples) break;
      idx[a] = 0;
    }
  }
}

std::vector<std::vector<cplx>> mod_tables(const Grid& g, bool conj) {
  // mod_j = prod_a e(k0_a j_a / N_a)
  std::vector<std::vector<cplx>> t(g.dims());
  for (int a = 0; a < g.dims(); ++a) {
    t[a].resize(g.axes[a].samples);
    for (std::int64_t j = 0; j < g.axes[a].samples; ++j) {
      double arg = double(g.axes[a].freq_offset) * double(j) / double(g.axes[a].samples);
      cplx p = unit_phase(arg);
      t[a][j] = conj ? std::conj(p) : p;
    }
  }
  return t;
}

std::vector<std::vector<cplx>> origin_tables(const Grid& g, bool conj) {
  // e(xi_k x0) per axis
  std::vector<std::vector<cplx>> t(g.dims());
  for (int a = 0; a < g.dims(); ++a) {
    t[a].resize(g.axes[a].samples);
    for (std::int64_t k = 0; k < g.axes[a].samples; ++k) {
      double arg = g.axes[a].freq(k) * g.axes[a].spatial_origin;
      cplx p = unit_phase(arg);
      t[a][k] = conj ? std::conj(p) : p;
    }
  }
  return t;
}

}  // namespace

void fft_nd(const Grid& g, std::vector<cplx>& data, bool forward) {
  std::vector<int> dims;
  for (const auto& ax : g.axes) dims.push_back(int(ax.samples));
  fftw_plan p = plan_cache().get(dims, forward, data.data());
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

void GridFunction::ensure_spatial() {
  if (sync_ != Sync::freq_only) return;
  // F_j = mod_j * BACKWARD(c .* e(xi x0))_j
  spatial_ = freq_;
  apply_separable(grid_, spatial_, origin_tables(grid_, false));
  fft_nd(grid_, spatial_, false);
  apply_separable(grid_, spatial_, mod_tables(grid_, false));
  sync_ = Sync::both;
}

void GridFunction::ensure_freq() {
  if (sync_ != Sync::spatial_only) return;
  // c_k = e(-xi x0) * FORWARD(F .* conj(mod))_k / N
  freq_ = spatial_;
  apply_separable(grid_, freq_, mod_tables(grid_, true));
  fft_nd(grid_, freq_, true);
  double scale = 1.0 / double(grid_.total_samples());
  for (auto& c : freq_) c *= scale;
  apply_separable(grid_, freq_, origin_tables(grid_, true));
  sync_ = Sync::both;
}

GridFunction GridFunction::resampled(std::int64_t factor) const {
  const_cast<GridFunction*>(this)->ensure_freq();
  Grid fine = grid_;
  for (auto& ax : fine.axes) ax.samples *= factor;
  GridFunction out(fine);
  out.freq_.assign(fine.total_samples(), cplx{});
  std::vector<std::int64_t> idx(grid_.dims(), 0);
  std::vector<std::int64_t> k(grid_.dims());
  for (std::int64_t lin = 0; lin < grid_.total_samples(); ++lin) {
    if (freq_[lin] != cplx{}) {
      for (int a = 0; a < grid_.dims(); ++a) k[a] = idx[a] + grid_.axes[a].freq_offset;
      out.freq_[out.linear_index(k)] = freq_[lin];
    }
    bump_index(idx);
  }
  out.sync_ = Sync::freq_only;
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!grid_.same_layout(o.grid_)) throw std::invalid_argument("grid mismatch in +=");
  ensure_freq();
  const_cast<GridFunction&>(o).ensure_freq();
  for (std::int64_t i = 0; i < grid_.total_samples(); ++i) freq_[i] += o.freq_[i];
  sync_ = Sync::freq_only;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  ensure_freq();
  for (auto& c : freq_) c *= s;
  sync_ = Sync::freq_only;
  return *this;
}

namespace {
constexpr char kMagic[17] = "DECLABGRIDFUNC01";  // 16 bytes on disk

void put_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                        (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}
}  // namespace

void GridFunction::save(const std::string& path) const {
  const_cast<GridFunction*>(this)->ensure_freq();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write(kMagic, 16);
  put_u32(os, std::uint32_t(grid_.dims()));
  for (const auto& ax : grid_.axes) put_u32(os, std::uint32_t(ax.samples));
  for (const auto& c : freq_) {
    double re = c.real(), im = c.imag();
    os.write(reinterpret_cast<const char*>(&re), 8);
    os.write(reinterpret_cast<const char*>(&im), 8);
  }
  nlohmann::ordered_json side;
  side["format"] = "declab-gridfunction";
  side["version"] = 1;
  side["dims"] = grid_.dims();
  side["convention"] = "F(x) = sum_k c_k exp(2 pi i xi_k . x)";
  auto& axes = side["axes"] = nlohmann::ordered_json::array();
  for (const auto& ax : grid_.axes) {
    nlohmann::ordered_json a;
    a["period"] = ax.period;
    a["samples"] = ax.samples;
    a["freq_offset"] = ax.freq_offset;
    a["spatial_origin"] = ax.spatial_origin;
    axes.push_back(a);
  }
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

GridFunction GridFunction::load(const std::string& path) {
  std::ifstream js(path + ".json");
  if (!js) throw std::runtime_error("missing sidecar for " + path);
  nlohmann::json side = nlohmann::json::parse(js);
  Grid g;
  for (const auto& a : side.at("axes")) {
    Axis ax;
    ax.period = a.at("period").get<double>();
    ax.samples = a.at("samples").get<std::int64_t>();
    ax.freq_offset = a.at("freq_offset").get<std::int64_t>();
    ax.spatial_origin = a.at("spatial_origin").get<double>();
    g.axes.push_back(ax);
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[16];
  is.read(magic, 16);
  if (std::memcmp(magic, kMagic, 16) != 0) throw std::runtime_error("bad magic in " + path);
  std::uint32_t dims = get_u32(is);
  if (int(dims) != g.dims()) throw std::runtime_error("sidecar/binary dim mismatch");
  for (int a = 0; a < g.dims(); ++a) {
    std::uint32_t n = get_u32(is);
    if (std::int64_t(n) != g.axes[a].samples) throw std::runtime_error("sidecar/binary size mismatch");
  }
  GridFunction f(g);
  f.freq_.resize(f.grid_.total_samples());
  for (auto& c : f.freq_) {
    double re, im;
    is.read(reinterpret_cast<char*>(&re), 8);
    is.read(reinterpret_cast<char*>(&im), 8);
    c = {re, im};
  }
  if (!is) throw std::runtime_error("truncated data in " + path);
  f.sync_ = Sync::freq_only;
  return f;
}

}  // namespace declab
