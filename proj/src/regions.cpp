#include "declab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace declab {

bool FreqBox::contains(std::span<const double> xi, double eps) const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (xi[a] < lo[a] - eps || xi[a] >= hi[a] - eps) return false;
  }
  return true;
}

double FreqBox::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < lo.size(); ++a) v *= (hi[a] - lo[a]);
  return v;
}

bool FrequencyRegion::contains(std::span<const double> xi, double eps) const {
  for (const auto& b : boxes)
    if (b.contains(xi, eps)) return true;
  return false;
}

bool FrequencyRegion::pairwise_disjoint() const {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      bool overlap = true;
      for (std::size_t a = 0; a < boxes[i].lo.size(); ++a) {
        if (!(boxes[i].lo[a] < boxes[j].hi[a] && boxes[j].lo[a] < boxes[i].hi[a])) {
          overlap = false;
          break;
        }
      }
      if (overlap) return false;
    }
  }
  return true;
}

std::vector<double> FrequencyRegion::lo() const {
  std::vector<double> out = boxes.at(0).lo;
  for (const auto& b : boxes)
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = std::min(out[a], b.lo[a]);
  return out;
}

std::vector<double> FrequencyRegion::hi() const {
  std::vector<double> out = boxes.at(0).hi;
  for (const auto& b : boxes)
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = std::max(out[a], b.hi[a]);
  return out;
}

bool Cap::contains(std::span<const double> xi) const {
  double r2 = 0.0;
  for (std::size_t a = 0; a < tau_lo.size(); ++a) {
    if (xi[a] < tau_lo[a] || xi[a] >= tau_hi[a]) return false;
    r2 += xi[a] * xi[a];
  }
  double t = xi[tau_lo.size()] - r2;
  // half-open in t, with a hair of slack at the closed end for fp rounding
  return t >= -1e-12 && t < delta - 1e-12;
}

std::vector<double> Cap::base_center() const {
  std::vector<double> c(tau_lo.size());
  for (std::size_t a = 0; a < tau_lo.size(); ++a) c[a] = 0.5 * (tau_lo[a] + tau_hi[a]);
  return c;
}

double Cap::padding_factor() const {
  double cap_measure = delta;
  for (std::size_t a = 0; a < tau_lo.size(); ++a) cap_measure *= (tau_hi[a] - tau_lo[a]);
  return hull.volume() / cap_measure;
}

std::int64_t expected_cap_count(double delta, int n_dims) {
  double c = std::pow(delta, -double(n_dims - 1) / 2.0);
  return std::llround(c);
}

namespace {
// delta = 4^{-k}? returns k, or nullopt
std::optional<int> dyadic_quarter_power(double delta) {
  if (!(delta > 0.0) || delta > 1.0) return std::nullopt;
  double l = -std::log2(delta);
  int twok = int(std::llround(l));
  if (std::abs(l - double(twok)) > 1e-12) return std::nullopt;
  if (twok % 2 != 0) return std::nullopt;
  if (std::ldexp(1.0, -twok) != delta) return std::nullopt;
  return twok / 2;
}
}  // namespace

CapPartition cap_partition(double delta, int n_dims, double base_lo) {
  auto k = dyadic_quarter_power(delta);
  if (!k)
    throw std::invalid_argument(
        "delta must be 4^{-k} so that delta^{1/2} is dyadic");
  if (n_dims < 2) throw std::invalid_argument("need ambient dimension >= 2");
  const int d = n_dims - 1;
  const double w = std::ldexp(1.0, -*k);  // delta^{1/2}
  const std::int64_t per_axis = std::int64_t(1) << *k;

  CapPartition part;
  part.delta = delta;
  part.n_dims = n_dims;
  part.base_lo.assign(d, base_lo);

  std::vector<std::int64_t> idx(d, 0);
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  for (std::int64_t lin = 0; lin < total; ++lin) {
    Cap cap;
    cap.delta = delta;
    cap.index = int(lin);
    cap.tau_lo.resize(d);
    cap.tau_hi.resize(d);
    double lo2 = 0.0, hi2 = 0.0;
    for (int a = 0; a < d; ++a) {
      cap.tau_lo[a] = base_lo + double(idx[a]) * w;
      cap.tau_hi[a] = cap.tau_lo[a] + w;
      double m = std::max(std::abs(cap.tau_lo[a]), std::abs(cap.tau_hi[a]));
      double mn = 0.0;
      if (cap.tau_lo[a] > 0.0)
        mn = cap.tau_lo[a];
      else if (cap.tau_hi[a] < 0.0)
        mn = -cap.tau_hi[a];
      lo2 += mn * mn;
      hi2 += m * m;
    }
    cap.hull.lo = cap.tau_lo;
    cap.hull.hi = cap.tau_hi;
    cap.hull.lo.push_back(lo2);
    cap.hull.hi.push_back(hi2 + delta);
    cap.hull.id = "cap" + std::to_string(lin);
    part.caps.push_back(std::move(cap));

    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return part;
}

std::vector<double> AffineFreqMap::apply(std::span<const double> xi) const {
  const int n = dims();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double s = shift[i];
    for (int j = 0; j < n; ++j) s += mat[i][j] * xi[j];
    out[i] = s;
  }
  return out;
}

double AffineFreqMap::det() const {
  // Gaussian elimination with partial pivoting
  auto a = mat;
  const int n = dims();
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (int r = c + 1; r < n; ++r) {
      double f = a[r][c] / a[c][c];
      for (int j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

AffineFreqMap AffineFreqMap::inverse() const {
  const int n = dims();
  // invert [A | I] by Gauss-Jordan
  std::vector<std::vector<double>> a = mat;
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::domain_error("singular affine map");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    double f = a[c][c];
    for (int j = 0; j < n; ++j) {
      a[c][j] /= f;
      inv[c][j] /= f;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double g = a[r][c];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= g * a[c][j];
        inv[r][j] -= g * inv[c][j];
      }
    }
  }
  AffineFreqMap out;
  out.mat = inv;
  out.shift.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.shift[i] -= inv[i][j] * shift[j];
  return out;
}

FreqBox AffineFreqMap::apply_box(const FreqBox& b) const {
  const int n = dims();
  // hull over mapped corners
  FreqBox out;
  out.lo.assign(n, 1e300);
  out.hi.assign(n, -1e300);
  out.id = b.id;
  const int corners = 1 << n;
  std::vector<double> xi(n);
  for (int m = 0; m < corners; ++m) {
    for (int a = 0; a < n; ++a) xi[a] = (m >> a & 1) ? b.hi[a] : b.lo[a];
    auto y = apply(xi);
    for (int a = 0; a < n; ++a) {
      out.lo[a] = std::min(out.lo[a], y[a]);
      out.hi[a] = std::max(out.hi[a], y[a]);
    }
  }
  return out;
}

AffineFreqMap identity_map(int dims) {
  AffineFreqMap t;
  t.mat.assign(dims, std::vector<double>(dims, 0.0));
  for (int i = 0; i < dims; ++i) t.mat[i][i] = 1.0;
  t.shift.assign(dims, 0.0);
  return t;
}

AffineFreqMap translation_map(std::span<const double> v) {
  AffineFreqMap t = identity_map(int(v.size()));
  t.shift.assign(v.begin(), v.end());
  return t;
}

AffineFreqMap dilation_map(std::span<const double> scale) {
  AffineFreqMap t = identity_map(int(scale.size()));
  for (std::size_t i = 0; i < scale.size(); ++i) t.mat[i][i] = scale[i];
  return t;
}

AffineFreqMap vertical_shear_map(int dims, std::span<const std::int64_t> m) {
  AffineFreqMap t = identity_map(dims);
  for (int j = 0; j < dims - 1; ++j) t.mat[dims - 1][j] = double(m[j]);
  return t;
}

AffineFreqMap parabolic_map(std::span<const double> c, double sigma) {
  if (!(sigma > 0.0) || sigma > 1.0)
    throw std::invalid_argument("sigma must lie in (0, 1]");
  double l = -std::log2(sigma);
  if (std::abs(l - std::round(l)) > 1e-12 || std::llround(l) % 2 != 0)
    throw std::invalid_argument("sigma must be 4^{-m} so sqrt(sigma) is dyadic");
  const int d = int(c.size());
  const int n = d + 1;
  const double rs = std::sqrt(sigma);
  AffineFreqMap t;
  t.mat.assign(n, std::vector<double>(n, 0.0));
  t.shift.assign(n, 0.0);
  for (int i = 0; i < d; ++i) {
    t.mat[i][i] = 1.0 / rs;
    t.shift[i] = -c[i] / rs;
  }
  double c2 = 0.0;
  for (int i = 0; i < d; ++i) {
    t.mat[n - 1][i] = -2.0 * c[i] / sigma;
    c2 += c[i] * c[i];
  }
  t.mat[n - 1][n - 1] = 1.0 / sigma;
  t.shift[n - 1] = c2 / sigma;
  return t;
}

GridFunction project_if(const GridFunction& f,
                        const std::function<bool(std::span<const double>)>& keep) {
  GridFunction g = f;
  auto coeffs = g.mutable_freq();
  const Grid& gr = g.grid();
  std::vector<std::int64_t> idx(gr.dims(), 0);
  std::vector<double> xi(gr.dims());
  for (std::int64_t lin = 0; lin < gr.total_samples(); ++lin) {
    if (coeffs[lin] != cplx{}) {
      for (int a = 0; a < gr.dims(); ++a) xi[a] = gr.axes[a].freq(idx[a]);
      if (!keep(xi)) coeffs[lin] = cplx{};
    }
    g.bump_index(idx);
  }
  return g;
}

GridFunction project(const GridFunction& f, const FrequencyRegion& region) {
  // lattice points sit at spacing 1/L; half a spacing of slack keeps dyadic
  // box edges robust
  double eps = 0.0;
  for (const auto& ax : f.grid().axes) eps = std::max(eps, 1e-6 * ax.freq_spacing());
  auto lo = region.lo();
  auto hi = region.hi();
  if (!f.grid().resolves(lo, hi))
    throw std::domain_error("region extends outside the resolvable band");
  return project_if(f, [&](std::span<const double> xi) { return region.contains(xi, eps); });
}

GridFunction project(const GridFunction& f, const Cap& cap) {
  return project_if(f, [&](std::span<const double> xi) { return cap.contains(xi); });
}

GridFunction apply_affine_freq(const GridFunction& f, const AffineFreqMap& t,
                               const Grid& target) {
  auto modes = f.nonzero_modes();
  const Grid& src = f.grid();
  const double jac = std::abs(t.det());
  if (jac <= 0.0) throw std::domain_error("affine map must be nonsingular");
  std::vector<Mode> out;
  out.reserve(modes.size());
  std::vector<double> xi(src.dims());
  for (const auto& m : modes) {
    for (int a = 0; a < src.dims(); ++a) xi[a] = m.k[a] / src.axes[a].period;
    auto y = t.apply(xi);
    Mode nm;
    nm.k.resize(y.size());
    for (std::size_t a = 0; a < y.size(); ++a) {
      double lat = y[a] * target.axes[a].period;
      double r = std::round(lat);
      if (std::abs(lat - r) > 1e-9)
        throw std::domain_error("map does not preserve the frequency lattice");
      nm.k[a] = std::int64_t(r);
    }
    nm.coeff = m.coeff * jac;
    out.push_back(std::move(nm));
  }
  return GridFunction::from_modes(target, out);
}

}  // namespace declab
