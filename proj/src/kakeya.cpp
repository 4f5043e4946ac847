#include "declab/kakeya.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "declab/norms.hpp"
#include "declab/regions.hpp"

namespace declab {

void TubeFamily::export_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "dim";
  for (int a = 0; a < ambient_dim; ++a) os << ",center" << a;
  for (int a = 0; a < ambient_dim; ++a) os << ",direction" << a;
  os << ",short_radius,length,weight\n";
  char buf[64];
  for (const auto& t : tubes) {
    os << ambient_dim;
    for (int a = 0; a < ambient_dim; ++a) {
      std::snprintf(buf, sizeof buf, ",%.17g", t.center[a]);
      os << buf;
    }
    for (int a = 0; a < ambient_dim; ++a) {
      std::snprintf(buf, sizeof buf, ",%.17g", t.direction[a]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", std::sqrt(t.scale), t.scale,
                  t.weight);
    os << buf;
  }
}

TubeFamily TubeFamily::import_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  TubeFamily fam;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    int dim = int(vals[0]);
    FatTube t;
    t.center.assign(vals.begin() + 1, vals.begin() + 1 + dim);
    t.direction.assign(vals.begin() + 1 + dim, vals.begin() + 1 + 2 * dim);
    t.scale = vals[1 + 2 * dim + 1];
    t.weight = vals[1 + 2 * dim + 2];
    fam.ambient_dim = dim;
    fam.scale = t.scale;
    fam.tubes.push_back(std::move(t));
  }
  return fam;
}

std::vector<double> paraboloid_normal(std::span<const double> xi) {
  // graph xi_n = |xi|^2 has normal proportional to (-2 xi, 1)
  std::vector<double> n(xi.size() + 1);
  double s = 1.0;
  for (std::size_t a = 0; a < xi.size(); ++a) {
    n[a] = -2.0 * xi[a];
    s += n[a] * n[a];
  }
  n[xi.size()] = 1.0;
  double inv = 1.0 / std::sqrt(s);
  for (auto& v : n) v *= inv;
  return n;
}

namespace {
double det_n(std::vector<std::vector<double>> m) {
  const int n = int(m.size());
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return d;
}
}  // namespace

TransversalityCert transversality(std::span<const BaseCube> caps, int ambient_dim) {
  const int k = int(caps.size());
  const int d = ambient_dim - 1;
  if (k < 2 || k > ambient_dim)
    throw std::invalid_argument("need between 2 and n base cubes");

  // corner enumeration per cap
  std::vector<std::vector<std::vector<double>>> corners(k);
  for (int i = 0; i < k; ++i) {
    const int cc = 1 << d;
    for (int m = 0; m < cc; ++m) {
      std::vector<double> pt(d);
      for (int a = 0; a < d; ++a) pt[a] = (m >> a & 1) ? caps[i].hi[a] : caps[i].lo[a];
      corners[i].push_back(pt);
    }
  }

  TransversalityCert cert;
  cert.nu = 1e300;
  std::vector<int> pick(k, 0);
  const int cc = 1 << d;
  while (true) {
    // wedge of the k normals: for k < n, use the square root of the Gram
    // determinant (k-volume of the parallelepiped)
    std::vector<std::vector<double>> normals;
    for (int i = 0; i < k; ++i) normals.push_back(paraboloid_normal(corners[i][pick[i]]));
    double vol;
    if (k == ambient_dim) {
      vol = std::abs(det_n(normals));
    } else {
      std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int a = 0; a < ambient_dim; ++a) gram[i][j] += normals[i][a] * normals[j][a];
      vol = std::sqrt(std::max(0.0, det_n(gram)));
    }
    if (vol < cert.nu) {
      cert.nu = vol;
      cert.witness_points.clear();
      for (int i = 0; i < k; ++i) cert.witness_points.push_back(corners[i][pick[i]]);
    }
    int i = k - 1;
    while (i >= 0 && ++pick[i] == cc) pick[i--] = 0;
    if (i < 0) break;
  }
  return cert;
}

double min_cross_wedge(const TubeFamily& a, const TubeFamily& b) {
  double m = 1e300;
  for (const auto& t1 : a.tubes)
    for (const auto& t2 : b.tubes) {
      double w = std::abs(t1.direction[0] * t2.direction[1] -
                          t1.direction[1] * t2.direction[0]);
      m = std::min(m, w);
    }
  return m;
}

std::vector<std::array<double, 2>> tube_corners(const FatTube& t) {
  double hx = t.direction[0], hy = t.direction[1];
  double half_l = t.scale / 2.0, half_w = std::sqrt(t.scale) / 2.0;
  double px = -hy, py = hx;
  std::vector<std::array<double, 2>> c(4);
  c[0] = {t.center[0] + hx * half_l + px * half_w, t.center[1] + hy * half_l + py * half_w};
  c[1] = {t.center[0] + hx * half_l - px * half_w, t.center[1] + hy * half_l - py * half_w};
  c[2] = {t.center[0] - hx * half_l - px * half_w, t.center[1] - hy * half_l - py * half_w};
  c[3] = {t.center[0] - hx * half_l + px * half_w, t.center[1] - hy * half_l + py * half_w};
  return c;
}

double convex_intersection_area(std::span<const std::array<double, 2>> poly_a,
                                std::span<const std::array<double, 2>> poly_b) {
  // clip poly_a against each (counter-clockwise) edge of poly_b
  std::vector<std::array<double, 2>> cur(poly_a.begin(), poly_a.end());

  // ensure poly_b is counter-clockwise
  std::vector<std::array<double, 2>> clip(poly_b.begin(), poly_b.end());
  double area2 = 0.0;
  for (std::size_t i = 0; i < clip.size(); ++i) {
    auto& p = clip[i];
    auto& q = clip[(i + 1) % clip.size()];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  if (area2 < 0) std::reverse(clip.begin(), clip.end());

  for (std::size_t e = 0; e < clip.size() && !cur.empty(); ++e) {
    auto A = clip[e];
    auto B = clip[(e + 1) % clip.size()];
    auto inside = [&](const std::array<double, 2>& p) {
      return (B[0] - A[0]) * (p[1] - A[1]) - (B[1] - A[1]) * (p[0] - A[0]) >= -1e-12;
    };
    auto intersect = [&](const std::array<double, 2>& p, const std::array<double, 2>& q) {
      double a1 = B[0] - A[0], a2 = B[1] - A[1];
      double b1 = q[0] - p[0], b2 = q[1] - p[1];
      double den = a1 * b2 - a2 * b1;
      double t = ((A[0] - p[0]) * a2 - (A[1] - p[1]) * a1) / (-den);
      return std::array<double, 2>{p[0] + t * b1, p[1] + t * b2};
    };
    std::vector<std::array<double, 2>> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      auto P = cur[i];
      auto Q = cur[(i + 1) % cur.size()];
      bool pin = inside(P), qin = inside(Q);
      if (pin) next.push_back(P);
      if (pin != qin) next.push_back(intersect(P, Q));
    }
    cur = std::move(next);
  }
  double area = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    auto& p = cur[i];
    auto& q = cur[(i + 1) % cur.size()];
    area += p[0] * q[1] - q[0] * p[1];
  }
  return std::abs(area) / 2.0;
}

double bilinear_kakeya_ratio(const TubeFamily& t1, const TubeFamily& t2, double R,
                             double nu_min) {
  if (t1.ambient_dim != 2 || t2.ambient_dim != 2)
    throw std::invalid_argument("exact bilinear functional is planar");
  double nu = min_cross_wedge(t1, t2);
  if (nu < nu_min)
    throw std::domain_error("families are not transverse enough (nu = " +
                            std::to_string(nu) + ")");
  double cross = 0.0;
  for (const auto& a : t1.tubes) {
    auto ca = tube_corners(a);
    for (const auto& b : t2.tubes) {
      auto cb = tube_corners(b);
      double area = convex_intersection_area(ca, cb);
      if (area > 0) cross += a.weight * b.weight * area;
    }
  }
  double m1 = 0.0, m2 = 0.0;
  for (const auto& a : t1.tubes) m1 += a.weight * R * std::sqrt(R);
  for (const auto& b : t2.tubes) m2 += b.weight * R * std::sqrt(R);
  double rhs = m1 * m2 / (R * R);
  if (rhs == 0.0) throw std::domain_error("empty family");
  return cross / rhs;
}

namespace {
// orthonormal frame completing the unit direction d
std::vector<std::vector<double>> cross_frame(std::span<const double> d) {
  const int n = int(d.size());
  std::vector<std::vector<double>> frame;
  std::vector<double> seed(n, 0.0);
  int least = 0;
  for (int a = 1; a < n; ++a)
    if (std::abs(d[a]) < std::abs(d[least])) least = a;
  seed[least] = 1.0;
  std::vector<std::vector<double>> basis{std::vector<double>(d.begin(), d.end())};
  auto gs = [&](std::vector<double> v) {
    for (const auto& b : basis) {
      double dot = 0.0;
      for (int a = 0; a < n; ++a) dot += v[a] * b[a];
      for (int a = 0; a < n; ++a) v[a] -= dot * b[a];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
  };
  std::vector<double> u = gs(seed);
  basis.push_back(u);
  frame.push_back(u);
  if (n == 3) {
    std::vector<double> w(3);
    w[0] = d[1] * u[2] - d[2] * u[1];
    w[1] = d[2] * u[0] - d[0] * u[2];
    w[2] = d[0] * u[1] - d[1] * u[0];
    frame.push_back(w);
  }
  return frame;
}

bool in_tube(const FatTube& t, std::span<const double> x,
             const std::vector<std::vector<double>>& frame) {
  const int n = int(t.center.size());
  double along = 0.0;
  for (int a = 0; a < n; ++a) along += (x[a] - t.center[a]) * t.direction[a];
  if (std::abs(along) > t.scale / 2.0) return false;
  for (const auto& u : frame) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += (x[a] - t.center[a]) * u[a];
    if (std::abs(s) > std::sqrt(t.scale) / 2.0) return false;
  }
  return true;
}
}  // namespace

double multilinear_kakeya_ratio(std::span<const TubeFamily> families, double R, double q,
                                double nu_min, int cells_per_short) {
  const int n = int(families.size());
  if (n < 2 || n > 3) throw std::invalid_argument("2 or 3 families supported");
  for (const auto& f : families)
    if (f.ambient_dim != n) throw std::invalid_argument("need n transversal families in R^n");
  if (q < double(n) / double(n - 1) - 1e-12)
    throw std::invalid_argument("q below the endpoint n/(n-1)");

  // transversality across the n families: wedge of one direction per family
  {
    double worst = 1e300;
    std::vector<std::size_t> pick(n, 0);
    bool done = false;
    while (!done) {
      std::vector<std::vector<double>> dirs;
      for (int j = 0; j < n; ++j) dirs.push_back(families[j].tubes[pick[j]].direction);
      worst = std::min(worst, std::abs(det_n(dirs)));
      int j = n - 1;
      while (j >= 0 && ++pick[j] == families[j].tubes.size()) pick[j--] = 0;
      if (j < 0) done = true;
    }
    if (worst < nu_min)
      throw std::domain_error("families are not transverse enough (nu = " +
                              std::to_string(worst) + ")");
  }

  // precompute frames
  std::vector<std::vector<std::vector<std::vector<double>>>> frames(n);
  for (int j = 0; j < n; ++j)
    for (const auto& t : families[j].tubes) frames[j].push_back(cross_frame(t.direction));

  const double h = std::sqrt(R) / cells_per_short;
  // domain: bounding box of all tubes
  std::vector<double> lo(n, 1e300), hi(n, -1e300);
  for (const auto& fam : families)
    for (const auto& t : fam.tubes)
      for (int a = 0; a < n; ++a) {
        lo[a] = std::min(lo[a], t.center[a] - t.scale);
        hi[a] = std::max(hi[a], t.center[a] + t.scale);
      }
  std::vector<std::int64_t> cells(n);
  for (int a = 0; a < n; ++a) cells[a] = std::int64_t(std::ceil((hi[a] - lo[a]) / h));

  double acc = 0.0;
  std::vector<std::int64_t> idx(n, 0);
  std::vector<double> x(n);
  bool done = false;
  const double cell_vol = std::pow(h, n);
  while (!done) {
    for (int a = 0; a < n; ++a) x[a] = lo[a] + (idx[a] + 0.5) * h;
    double prod = 1.0;
    for (int j = 0; j < n && prod != 0.0; ++j) {
      double count = 0.0;
      for (std::size_t t = 0; t < families[j].tubes.size(); ++t)
        if (in_tube(families[j].tubes[t], x, frames[j][t])) count += 1.0;
      prod *= count;
    }
    if (prod != 0.0) acc += std::pow(prod, q / double(n)) * cell_vol;
    int a = n - 1;
    while (a >= 0 && ++idx[a] == cells[a]) idx[a--] = 0;
    if (a < 0) done = true;
  }
  double lhs = std::pow(acc, double(n) / q);
  double counts = 1.0;
  for (const auto& fam : families) counts *= double(fam.tubes.size());
  double rhs = std::pow(R, double(n) * double(n) / (2.0 * q)) * counts;
  return lhs / rhs;
}

BallInflationReport ball_inflation_check(const GridFunction& f, double delta, double q,
                                         double i1_lo, double i1_hi, double i2_lo,
                                         double i2_hi) {
  const Grid& g = f.grid();
  if (g.dims() != 2) throw std::invalid_argument("ball inflation check is planar");
  if (q < 2.0) throw std::invalid_argument("q must be >= 2");
  if (i2_lo - i1_hi < 0.25 - 1e-12) throw std::domain_error("intervals not separated");
  const double p = 2.0 * q;
  const double d2 = delta * delta;

  auto modes = f.nonzero_modes();
  if (modes.empty()) return BallInflationReport{0.0, 0.0, 0.0, true};
  for (const auto& m : modes) {
    double x = double(m.k[0]) / g.axes[0].period;
    double t = double(m.k[1]) / g.axes[1].period - x * x;
    bool in1 = x >= i1_lo - 1e-12 && x <= i1_hi + 1e-12;
    bool in2 = x >= i2_lo - 1e-12 && x <= i2_hi + 1e-12;
    if ((!in1 && !in2) || t < -1e-12 || t > d2 + 1e-12)
      throw std::domain_error("support escapes N(delta^2) over the two intervals");
  }

  // strips of width delta inside each interval
  struct Strip {
    int side;
    std::vector<Mode> modes;
    GridFunction sub;  // materialized on its own subgrid
  };
  std::vector<Strip> strips;
  const double los[2] = {i1_lo, i2_lo}, his[2] = {i1_hi, i2_hi};
  for (int side = 0; side < 2; ++side) {
    std::int64_t cells = std::int64_t(std::llround((his[side] - los[side]) / delta));
    for (std::int64_t c = 0; c < cells; ++c) {
      double lo = los[side] + c * delta, hi = lo + delta;
      Strip s;
      s.side = side;
      for (const auto& m : modes) {
        double x = double(m.k[0]) / g.axes[0].period;
        bool last = (c == cells - 1);
        if (x >= lo - 1e-12 && (x < hi - 1e-12 || (last && x <= hi + 1e-12)))
          s.modes.push_back(m);
      }
      if (!s.modes.empty()) strips.push_back(std::move(s));
    }
  }

  // materialize each strip on a modulated subgrid once
  int os = 8;
  for (auto& s : strips) {
    const int nd = g.dims();
    std::vector<std::int64_t> kmin(nd), kmax(nd);
    for (int a = 0; a < nd; ++a) kmin[a] = kmax[a] = s.modes[0].k[a];
    for (const auto& m : s.modes)
      for (int a = 0; a < nd; ++a) {
        kmin[a] = std::min(kmin[a], m.k[a]);
        kmax[a] = std::max(kmax[a], m.k[a]);
      }
    Grid sub;
    sub.axes.resize(nd);
    for (int a = 0; a < nd; ++a) {
      std::int64_t extent = kmax[a] - kmin[a] + 1;
      std::int64_t want = extent * os;
      std::int64_t m2 = 1;
      while (m2 < want) m2 <<= 1;
      sub.axes[a] = Axis{g.axes[a].period, m2, kmin[a], g.axes[a].spatial_origin};
    }
    s.sub = GridFunction::from_modes(sub, s.modes);
    s.sub.ensure_spatial();
  }

  auto weighted_q_avg = [&](Strip& s, std::span<const double> center, double side_len) {
    WeightSpec w = WeightSpec::for_cube(center, side_len, 2);
    SpatialBox box;
    box.center.assign(center.begin(), center.end());
    box.half_side.assign(2, side_len / 2.0);
    return lp_norm(s.sub, box, q, NormKind::weighted_avg, &w);
  };

  const double q_side = 1.0 / d2;
  const double d_side = 1.0 / delta;
  const std::int64_t per_axis = std::int64_t(std::llround(q_side / d_side));

  // RHS: weighted averages over Q
  std::vector<double> center_q{0.0, 0.0};
  double rhs_prod = 1.0;
  for (int side = 0; side < 2; ++side) {
    double sq = 0.0;
    for (auto& s : strips)
      if (s.side == side) {
        double v = weighted_q_avg(s, center_q, q_side);
        sq += v * v;
      }
    rhs_prod *= std::pow(sq, 0.25);
  }
  BallInflationReport rep;
  rep.rhs = std::pow(rhs_prod, p);

  // LHS: average over the Delta partition of Q
  double acc = 0.0;
  for (std::int64_t i = 0; i < per_axis; ++i) {
    for (std::int64_t j = 0; j < per_axis; ++j) {
      std::vector<double> c{-q_side / 2 + (i + 0.5) * d_side,
                            -q_side / 2 + (j + 0.5) * d_side};
      double prod = 1.0;
      for (int side = 0; side < 2; ++side) {
        double sq = 0.0;
        for (auto& s : strips)
          if (s.side == side) {
            double v = weighted_q_avg(s, c, d_side);
            sq += v * v;
          }
        prod *= std::pow(sq, 0.25);
      }
      acc += std::pow(prod, p);
    }
  }
  rep.lhs = acc / double(per_axis * per_axis);
  if (rep.rhs == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

TubeFamily random_transverse_family(int ambient_dim, double R, int count,
                                    double angle_center, double angle_spread, Rng& rng) {
  TubeFamily fam;
  fam.ambient_dim = ambient_dim;
  fam.scale = R;
  for (int i = 0; i < count; ++i) {
    FatTube t;
    t.scale = R;
    t.weight = 1.0;
    if (ambient_dim == 2) {
      double a = angle_center + angle_spread * (2.0 * rng.uniform() - 1.0);
      t.direction = {std::cos(a), std::sin(a)};
      t.center = {rng.uniform(-R / 2, R / 2), rng.uniform(-R / 2, R / 2)};
    } else {
      double a = angle_center + angle_spread * (2.0 * rng.uniform() - 1.0);
      double b = angle_spread * (2.0 * rng.uniform() - 1.0);
      // unit vector near the axis singled out by angle_center
      std::vector<double> d{std::cos(a) * std::cos(b), std::sin(a) * std::cos(b),
                            std::sin(b)};
      t.direction = d;
      t.center = {rng.uniform(-R / 2, R / 2), rng.uniform(-R / 2, R / 2),
                  rng.uniform(-R / 2, R / 2)};
    }
    fam.tubes.push_back(std::move(t));
  }
  return fam;
}

}  // namespace declab
