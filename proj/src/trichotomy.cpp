#include "declab/trichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "declab/norms.hpp"
#include "declab/regions.hpp"
#include "declab/rng.hpp"

namespace declab {

Grid trichotomy_grid(int k_param) {
  const std::int64_t L = std::int64_t(k_param) * k_param;
  const std::int64_t N = (k_param <= 8) ? 2 * L : L;
  Grid g;
  g.axes.resize(3);
  // base axes cover [-1/2, 1/2) (and more when oversampled)
  g.axes[0] = Axis{double(L), N, -N / 2, -double(L) / 2};
  g.axes[1] = Axis{double(L), N, -N / 2, -double(L) / 2};
  // vertical axis covers [0, 1/2 + K^{-2}] with margin
  g.axes[2] = Axis{double(L), N, -N / 8, -double(L) / 2};
  return g;
}

int alpha_cell_count(int k_param) { return k_param * k_param; }

FreqBox alpha_cell_box(int k_param, int idx) {
  const int i = idx / k_param, j = idx % k_param;
  FreqBox b;
  const double w = 1.0 / k_param;
  b.lo = {-0.5 + i * w, -0.5 + j * w};
  b.hi = {-0.5 + (i + 1) * w, -0.5 + (j + 1) * w};
  b.id = "alpha" + std::to_string(idx);
  return b;
}

namespace {

std::array<double, 2> cell_center(int k_param, int idx) {
  auto b = alpha_cell_box(k_param, idx);
  return {0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])};
}

int cell_of(int k_param, double x, double y) {
  int i = int(std::floor((x + 0.5) * k_param + 1e-12));
  int j = int(std::floor((y + 0.5) * k_param + 1e-12));
  if (i < 0 || i >= k_param || j < 0 || j >= k_param) return -1;
  return i * k_param + j;
}

double line_dist(const std::array<double, 3>& line, double x, double y) {
  double n = std::hypot(line[0], line[1]);
  return std::abs(line[0] * x + line[1] * y + line[2]) / n;
}

}  // namespace

BallClassification classify_ball(const GridFunction& f, const TrichotomySetup& setup) {
  const int K = setup.k_param;
  const double p = setup.p;
  const Grid& g = f.grid();
  const int cells = alpha_cell_count(K);

  auto modes = f.nonzero_modes();
  if (modes.empty()) throw std::domain_error("degenerate: F vanishes on the window");

  // bucket modes into cells by the base coordinates
  std::vector<std::vector<Mode>> per_cell(cells);
  for (const auto& m : modes) {
    double x = double(m.k[0]) / g.axes[0].period;
    double y = double(m.k[1]) / g.axes[1].period;
    int c = cell_of(K, x, y);
    if (c < 0) throw std::domain_error("support escapes the base square");
    per_cell[c].push_back(m);
  }

  std::vector<double> norms(cells, 0.0);
  for (int c = 0; c < cells; ++c)
    if (!per_cell[c].empty()) norms[c] = lp_norm_modes(g, per_cell[c], p);
  double f_norm = lp_norm(f, AllPeriod{}, p, NormKind::local);

  BallClassification out;
  int astar = 0;
  for (int c = 0; c < cells; ++c)
    if (norms[c] > norms[astar]) astar = c;
  out.alpha_star = astar;
  const double thresh = f_norm / (100.0 * K * K);
  for (int c = 0; c < cells; ++c)
    if (norms[c] >= thresh) out.s_big.push_back(c);

  const double rho = setup.cluster_cells / K;
  out.strip_half_width = rho;
  auto cs = cell_center(K, astar);

  bool clustered = true;
  int far_cell = -1;
  double far_d = -1.0;
  for (int c : out.s_big) {
    auto cc = cell_center(K, c);
    double d = std::hypot(cc[0] - cs[0], cc[1] - cs[1]);
    if (d > rho) clustered = false;
    if (d > far_d) {
      far_d = d;
      far_cell = c;
    }
  }

  if (clustered) {
    out.kind = BallClassification::Case::concentrated;
    out.certified_constant = f_norm / norms[astar];
    return out;
  }

  auto cf = cell_center(K, far_cell);
  // line through the centers of alpha_star and the farthest big cell
  double dx = cf[0] - cs[0], dy = cf[1] - cs[1];
  double nrm = std::hypot(dx, dy);
  out.line = {-dy / nrm, dx / nrm, (dy * cs[0] - dx * cs[1]) / nrm};

  bool all_in_strip = true;
  int off_cell = -1;
  double off_d = -1.0;
  for (int c : out.s_big) {
    auto cc = cell_center(K, c);
    double d = line_dist(out.line, cc[0], cc[1]);
    if (d <= rho) {
      out.strip_cells.push_back(c);
    } else {
      all_in_strip = false;
      if (d > off_d) {
        off_d = d;
        off_cell = c;
      }
    }
  }

  if (all_in_strip) {
    out.kind = BallClassification::Case::narrow;
    std::vector<Mode> strip_modes;
    for (int c : out.strip_cells)
      strip_modes.insert(strip_modes.end(), per_cell[c].begin(), per_cell[c].end());
    double strip_norm = lp_norm_modes(g, strip_modes, p);
    out.certified_constant = strip_norm > 0 ? f_norm / strip_norm : 0.0;
    return out;
  }

  out.kind = BallClassification::Case::broad;
  out.broad_cells = {astar, far_cell, off_cell};
  std::vector<BaseCube> cubes;
  for (int c : out.broad_cells) {
    auto b = alpha_cell_box(K, c);
    cubes.push_back(BaseCube{b.lo, b.hi});
  }
  out.nu = transversality(cubes, 3).nu;
  double geo = std::cbrt(norms[astar] * norms[far_cell] * norms[off_cell]);
  out.certified_constant = f_norm / (double(K) * K * geo);
  return out;
}

namespace {
// smallest dyadic scale 2^a (a <= 12) making every value an integer multiple
// within tol; returns -1 if none works
int dyadic_denominator(std::span<const double> vals, double tol) {
  for (int a = 0; a <= 12; ++a) {
    double s = std::ldexp(1.0, a);
    bool ok = true;
    for (double v : vals) {
      double w = v * s;
      if (std::abs(w - std::llround(w)) > tol) {
        ok = false;
        break;
      }
    }
    if (ok) return a;
  }
  return -1;
}
}  // namespace

NarrowCylinderReport narrow_cylinder_check(const GridFunction& f,
                                           const std::array<double, 3>& line,
                                           int k_param, double p) {
  const Grid& g = f.grid();
  const int K = k_param;
  NarrowCylinderReport rep;

  auto modes = f.nonzero_modes();
  if (modes.empty()) throw std::domain_error("empty function");

  double nline = std::hypot(line[0], line[1]);
  std::array<double, 2> dvec{line[1] / nline, -line[0] / nline};  // along the line
  // foot of the perpendicular from the origin
  std::array<double, 2> q{-line[0] * line[2] / (nline * nline),
                          -line[1] * line[2] / (nline * nline)};
  const double q2 = q[0] * q[0] + q[1] * q[1];

  // group modes by base cell; deviation of the paraboloid from the tangent
  // cylinder over the strip is exactly the squared distance to the line
  std::map<int, std::vector<std::size_t>> by_cell;
  std::vector<double> us(modes.size()), vs(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    double x = double(modes[i].k[0]) / g.axes[0].period;
    double y = double(modes[i].k[1]) / g.axes[1].period;
    double xi3 = double(modes[i].k[2]) / g.axes[2].period;
    double dist = line_dist(line, x, y);
    rep.max_deviation = std::max(rep.max_deviation, dist * dist);
    us[i] = (x - q[0]) * dvec[0] + (y - q[1]) * dvec[1];
    vs[i] = xi3 - q2;
    int cell = cell_of(K, x, y);
    if (cell < 0) throw std::domain_error("support escapes the base square");
    by_cell[cell].push_back(i);
  }
  rep.deviation_constant = rep.max_deviation * K * K;

  // order the cells along the line by the u of their first mode; the cap
  // spacing along the line is the smallest gap between group positions
  std::vector<std::pair<double, int>> order;
  for (auto& [cell, idxs] : by_cell) order.emplace_back(us[idxs.front()], cell);
  std::sort(order.begin(), order.end());
  double step = 1e300;
  for (std::size_t i = 1; i < order.size(); ++i)
    step = std::min(step, order[i].first - order[i - 1].first);
  if (order.size() < 2) step = 1.0 / K;

  // rescaled flattened coordinates U = u/step, V = v/step^2, snapped onto a
  // dyadic refinement of the integer lattice
  std::vector<double> uvals, vvals;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    uvals.push_back(us[i] / step);
    vvals.push_back(vs[i] / (step * step));
  }
  int au = dyadic_denominator(uvals, 1e-6);
  int av = dyadic_denominator(vvals, 1e-6);
  if (au < 0 || av < 0)
    throw std::domain_error("strip support does not flatten onto a dyadic lattice");

  std::vector<Mode> modes2d;
  std::int64_t umax = 1, vmax = 1;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    std::int64_t ku = std::llround(std::ldexp(uvals[i], au));
    std::int64_t kv = std::llround(std::ldexp(vvals[i], av));
    umax = std::max(umax, std::abs(ku));
    vmax = std::max(vmax, std::abs(kv));
    modes2d.push_back(Mode{{ku, kv}, modes[i].coeff});
  }

  // 3-d strip quotient
  double fn = lp_norm(f, AllPeriod{}, p, NormKind::local_avg);
  double den_sq = 0.0;
  for (auto& [cell, idxs] : by_cell) {
    std::vector<Mode> grp;
    for (auto i : idxs) grp.push_back(modes[i]);
    double v = lp_norm_modes(g, grp, p, 4, nullptr, NormKind::local_avg);
    den_sq += v * v;
  }
  rep.ratio_3d = fn / std::sqrt(den_sq);

  // 2-d quotient of the flattened family (any affine frame gives the same
  // quotient; periods chosen to keep the quadrature alias-free at even p)
  Grid g2;
  auto pick_n = [&](std::int64_t extent) {
    std::int64_t n = 64;
    while (n < 8 * extent) n <<= 1;
    return n;
  };
  double lu = double(std::ldexp(1.0, au));   // unit frequency spacing
  double lv = double(std::ldexp(1.0, av));
  g2.axes = {Axis{lu, pick_n(2 * umax + 1), -pick_n(2 * umax + 1) / 2, -lu / 2},
             Axis{lv, pick_n(2 * vmax + 1), -pick_n(2 * vmax + 1) / 2, -lv / 2}};
  GridFunction f2 = GridFunction::from_modes(g2, modes2d);
  double fn2 = lp_norm(f2, AllPeriod{}, p, NormKind::local_avg);
  std::map<std::int64_t, std::vector<Mode>> groups2;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    // same cell grouping as the 3-d side
    int cell = 0;
    {
      double x = double(modes[i].k[0]) / g.axes[0].period;
      double y = double(modes[i].k[1]) / g.axes[1].period;
      cell = cell_of(K, x, y);
    }
    groups2[cell].push_back(modes2d[i]);
  }
  double den2_sq = 0.0;
  for (auto& [cell, grp] : groups2) {
    double v = lp_norm_modes(g2, grp, p, 4, nullptr, NormKind::local_avg);
    den2_sq += v * v;
  }
  rep.ratio_2d = fn2 / std::sqrt(den2_sq);
  rep.ratio_quotient = rep.ratio_3d / rep.ratio_2d;
  return rep;
}

namespace {
GridFunction cells_instance(int k_param, std::span<const int> cells, int modes_per_cell,
                            std::uint64_t seed, bool center_only) {
  Grid g = trichotomy_grid(k_param);
  const double L = g.axes[0].period;
  const double delta = 1.0 / (double(k_param) * k_param);
  Rng rng(seed);
  std::vector<Mode> modes;
  for (int c : cells) {
    auto box = alpha_cell_box(k_param, c);
    std::int64_t x0 = std::int64_t(std::ceil(box.lo[0] * L));
    std::int64_t x1 = std::int64_t(std::ceil(box.hi[0] * L)) - 1;
    std::int64_t y0 = std::int64_t(std::ceil(box.lo[1] * L));
    std::int64_t y1 = std::int64_t(std::ceil(box.hi[1] * L)) - 1;
    int count = center_only ? 1 : modes_per_cell;
    for (int t = 0; t < count; ++t) {
      std::int64_t kx, ky;
      if (center_only) {
        kx = (x0 + x1 + 1) / 2;
        ky = (y0 + y1 + 1) / 2;
      } else {
        kx = rng.uniform_int(x0, x1);
        ky = rng.uniform_int(y0, y1);
      }
      double r2 = (double(kx) / L) * (double(kx) / L) + (double(ky) / L) * (double(ky) / L);
      std::int64_t z0 = std::int64_t(std::ceil(r2 * L - 1e-9));
      std::int64_t z1 = std::int64_t(std::floor((r2 + delta) * L + 1e-9));
      std::int64_t kz = center_only ? z0 : rng.uniform_int(z0, z1);
      cplx coeff = center_only ? cplx{1.0, 0.0} : cplx{rng.normal(), rng.normal()};
      modes.push_back(Mode{{kx, ky, kz}, coeff});
    }
  }
  return GridFunction::from_modes(g, modes);
}
}  // namespace

GridFunction single_cap_instance(int k_param, std::uint64_t seed) {
  int mid = (k_param / 2) * k_param + k_param / 2;
  std::vector<int> cells{mid};
  return cells_instance(k_param, cells, 6, seed, false);
}

GridFunction diagonal_line_instance(int k_param, std::uint64_t seed) {
  std::vector<int> cells;
  for (int i = 0; i < k_param; ++i) cells.push_back(i * k_param + i);
  return cells_instance(k_param, cells, 1, seed, true);
}

GridFunction corner_triple_instance(int k_param, std::uint64_t seed) {
  std::vector<int> cells{0, (k_param - 1) * k_param, k_param - 1};
  return cells_instance(k_param, cells, 1, seed, true);
}

GridFunction random_cell_instance(int k_param, int cells, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b9);
  std::vector<int> pick;
  for (int t = 0; t < cells; ++t)
    pick.push_back(int(rng.uniform_int(0, alpha_cell_count(k_param) - 1)));
  std::sort(pick.begin(), pick.end());
  pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
  return cells_instance(k_param, pick, 3, seed, false);
}

std::string classification_jsonl(const BallClassification& c, int k_param) {
  char buf[512];
  const char* kind = c.kind == BallClassification::Case::concentrated ? "concentrated"
                     : c.kind == BallClassification::Case::narrow     ? "narrow"
                                                                      : "broad";
  std::snprintf(buf, sizeof buf,
                "{\"window_side\":%d,\"case\":\"%s\",\"constant\":%.17g,"
                "\"alpha_star\":%d,\"nu\":%.17g,\"s_big_size\":%zu}",
                k_param * k_param, kind, c.certified_constant, c.alpha_star, c.nu,
                c.s_big.size());
  return std::string(buf);
}

}  // namespace declab
