#include "declab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace declab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double ball_volume(int n, double r) {
  switch (n) {
    case 1: return 2.0 * r;
    case 2: return M_PI * r * r;
    case 3: return 4.0 / 3.0 * M_PI * r * r * r;
    default: throw std::invalid_argument("ball volume only for n <= 3");
  }
}
}  // namespace

SpatialBox cube_at_origin(int dims, double side) {
  SpatialBox b;
  b.center.assign(dims, 0.0);
  b.half_side.assign(dims, side / 2.0);
  return b;
}

double region_volume(const Grid& g, const SpatialRegion& r) {
  if (std::holds_alternative<AllPeriod>(r)) return g.box_volume();
  if (const auto* b = std::get_if<SpatialBox>(&r)) {
    double v = 1.0;
    for (double h : b->half_side) v *= 2.0 * h;
    return v;
  }
  const auto& ball = std::get<SpatialBall>(r);
  return ball_volume(g.dims(), ball.radius);
}

bool region_contains(const Grid& g, const SpatialRegion& r, std::span<const double> x) {
  if (std::holds_alternative<AllPeriod>(r)) return true;
  if (const auto* b = std::get_if<SpatialBox>(&r)) {
    // half-open box so that partitions into subcubes tile grid points exactly
    for (int a = 0; a < g.dims(); ++a) {
      double d = g.wrapped_delta(a, x[a] - b->center[a]);
      if (d < -b->half_side[a] || d >= b->half_side[a]) return false;
    }
    return true;
  }
  const auto& ball = std::get<SpatialBall>(r);
  double s = 0.0;
  for (int a = 0; a < g.dims(); ++a) {
    double d = g.wrapped_delta(a, x[a] - ball.center[a]);
    s += d * d;
  }
  return s <= ball.radius * ball.radius;
}

WeightSpec WeightSpec::for_cube(std::span<const double> center, double side, int n_dims) {
  WeightSpec w;
  w.center.assign(center.begin(), center.end());
  w.radius = side;
  w.exponent = 100.0 * n_dims;
  w.shape = Shape::cube;
  return w;
}

WeightSpec WeightSpec::for_ball(std::span<const double> center, double radius, int n_dims) {
  WeightSpec w;
  w.center.assign(center.begin(), center.end());
  w.radius = radius;
  w.exponent = 100.0 * n_dims;
  w.shape = Shape::ball;
  return w;
}

double WeightSpec::value(const Grid& g, std::span<const double> x) const {
  double excess = 0.0;
  if (shape == Shape::cube) {
    for (int a = 0; a < g.dims(); ++a) {
      double d = std::abs(g.wrapped_delta(a, x[a] - center[a]));
      double e = std::max(0.0, d - radius / 2.0);
      excess += e * e;
    }
    excess = std::sqrt(excess);
  } else {
    double s = 0.0;
    for (int a = 0; a < g.dims(); ++a) {
      double d = g.wrapped_delta(a, x[a] - center[a]);
      s += d * d;
    }
    excess = std::max(0.0, std::sqrt(s) - radius);
  }
  return std::pow(1.0 + excess / radius, -exponent);
}

namespace {

// Shared accumulation over the spatial grid. Deterministic order (row-major).
template <class Fn>
void for_each_point(const Grid& g, std::span<const cplx> values, Fn&& fn) {
  std::vector<std::int64_t> idx(g.dims(), 0);
  std::vector<double> x(g.dims());
  const std::int64_t n = g.total_samples();
  for (std::int64_t lin = 0; lin < n; ++lin) {
    for (int a = 0; a < g.dims(); ++a) x[a] = g.axes[a].coord(idx[a]);
    fn(x, values[lin]);
    for (int a = g.dims() - 1; a >= 0; --a) {
      if (++idx[a] < g.axes[a].samples) break;
      idx[a] = 0;
    }
  }
}

double lp_norm_impl(const GridFunction& f, const SpatialRegion& region, double p,
                    NormKind kind, const WeightSpec* w) {
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
  const bool weighted = (kind == NormKind::weighted || kind == NormKind::weighted_avg);
  const bool avg = (kind == NormKind::local_avg || kind == NormKind::weighted_avg);
  if (weighted && !w) throw std::invalid_argument("weighted norms need a weight");

  const Grid& g = f.grid();
  const_cast<GridFunction&>(f).ensure_spatial();
  auto vals = f.spatial();

  if (p == kInf) {
    double m = 0.0;
    for_each_point(g, vals, [&](std::span<const double> x, cplx v) {
      if (weighted || region_contains(g, region, x)) m = std::max(m, std::abs(v));
    });
    return m;
  }

  double acc = 0.0;
  const double cell = g.cell_volume();
  for_each_point(g, vals, [&](std::span<const double> x, cplx v) {
    if (weighted) {
      acc += std::pow(std::abs(v), p) * w->value(g, x);
    } else if (region_contains(g, region, x)) {
      acc += std::pow(std::abs(v), p);
    }
  });
  acc *= cell;
  if (avg) acc /= region_volume(g, region);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_norm(const GridFunction& f, const SpatialRegion& region, double p,
               NormKind kind, const WeightSpec* w, int oversample) {
  if (oversample <= 1) return lp_norm_impl(f, region, p, kind, w);
  GridFunction fine = f.resampled(oversample);
  return lp_norm_impl(fine, region, p, kind, w);
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  if (!f.grid().same_layout(g.grid())) throw std::invalid_argument("grid mismatch");
  const_cast<GridFunction&>(f).ensure_freq();
  const_cast<GridFunction&>(g).ensure_freq();
  auto a = f.freq();
  auto b = g.freq();
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s * f.grid().box_volume();
}

double lp_norm_modes(const Grid& g, std::span<const Mode> modes, double p,
                     int oversample, const SpatialRegion* region, NormKind kind,
                     const WeightSpec* w) {
  if (modes.empty()) return 0.0;
  const int n = g.dims();
  std::vector<std::int64_t> kmin(n), kmax(n);
  for (int a = 0; a < n; ++a) kmin[a] = kmax[a] = modes[0].k[a];
  for (const auto& m : modes) {
    for (int a = 0; a < n; ++a) {
      kmin[a] = std::min(kmin[a], m.k[a]);
      kmax[a] = std::max(kmax[a], m.k[a]);
    }
  }
  Grid sub;
  sub.axes.resize(n);
  for (int a = 0; a < n; ++a) {
    std::int64_t extent = kmax[a] - kmin[a] + 1;
    std::int64_t want = extent * std::max(1, oversample);
    std::int64_t m = 1;
    while (m < want) m <<= 1;
    sub.axes[a] = Axis{g.axes[a].period, m, kmin[a], g.axes[a].spatial_origin};
  }
  GridFunction fsub = GridFunction::from_modes(sub, modes);
  SpatialRegion reg = region ? *region : SpatialRegion{AllPeriod{}};
  return lp_norm(fsub, reg, p, kind, w);
}

GatedNorm lp_norm_gated(const GridFunction& f, const SpatialRegion& region, double p,
                        NormKind kind, const WeightSpec* w) {
  GatedNorm out;
  out.coarse = lp_norm(f, region, p, kind, w);
  out.fine = lp_norm(f, region, p, kind, w, 2);
  double den = std::max(std::abs(out.coarse), std::abs(out.fine));
  out.rel_change = den > 0 ? std::abs(out.fine - out.coarse) / den : 0.0;
  out.accepted = out.rel_change < 5e-3;
  return out;
}

WeightReport check_weight_inequalities(int n_dims, std::span<const double> q_center,
                                       double q_side, int factor, int samples_per_axis) {
  // evaluated on the plain (non-periodic) metric; the sampling box extends a
  // couple of side lengths beyond Q so the tails are seen
  WeightReport rep;
  const int d = n_dims;
  // cube weight: side R; ball weight when R is passed as a radius with the
  // ball flag
  auto wval = [&](std::span<const double> c, double R, std::span<const double> x,
                  bool ball) {
    double excess = 0.0;
    if (ball) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
      excess = std::max(0.0, std::sqrt(s) - R);
    } else {
      for (int a = 0; a < d; ++a) {
        double e = std::max(0.0, std::abs(x[a] - c[a]) - R / 2.0);
        excess += e * e;
      }
      excess = std::sqrt(excess);
    }
    return std::pow(1.0 + excess / R, -100.0 * d);
  };

  const double sub = q_side / factor;
  std::vector<std::vector<double>> sub_centers;
  {
    std::vector<int> idx(d, 0);
    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= factor;
    for (std::int64_t lin = 0; lin < total; ++lin) {
      std::vector<double> c(d);
      for (int a = 0; a < d; ++a)
        c[a] = q_center[a] - q_side / 2 + (idx[a] + 0.5) * sub;
      sub_centers.push_back(c);
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < factor) break;
        idx[a] = 0;
      }
    }
  }

  rep.cover_min = 1e300;
  const double span = 2.5 * q_side;
  std::vector<int> idx(d, 0);
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= samples_per_axis;
  std::vector<double> x(d);
  for (std::int64_t lin = 0; lin < total; ++lin) {
    bool inside_q = true;
    for (int a = 0; a < d; ++a) {
      x[a] = q_center[a] - span / 2 + (idx[a] + 0.5) * (span / samples_per_axis);
      if (std::abs(x[a] - q_center[a]) > q_side / 2) inside_q = false;
    }
    double sum_cubes = 0.0, sum_balls = 0.0;
    for (const auto& c : sub_centers) {
      sum_cubes += wval(c, sub, x, false);
      sum_balls += wval(c, sub / 2, x, true);  // inscribed balls
    }
    double wq_cube = wval(std::span<const double>(q_center.data(), d), q_side, x, false);
    double wq_ball = wval(std::span<const double>(q_center.data(), d), q_side / 2, x, true);
    rep.chain_upper = std::max(rep.chain_upper, sum_cubes / wq_cube);
    rep.ball_upper = std::max(rep.ball_upper, sum_balls / wq_ball);
    if (inside_q) rep.cover_min = std::min(rep.cover_min, sum_cubes);

    // finitely overlapping same-size family: tile a 5x window with side-sub
    // cubes and sum their weights at x
    double overlap = 0.0;
    {
      std::vector<int> t(d, 0);
      int per = int(std::ceil(span / sub));
      std::int64_t tt = 1;
      for (int a = 0; a < d; ++a) tt *= per;
      for (std::int64_t u = 0; u < tt; ++u) {
        std::vector<double> c(d);
        for (int a = 0; a < d; ++a)
          c[a] = q_center[a] - span / 2 + (t[a] + 0.5) * sub;
        overlap += wval(c, sub, x, false);
        for (int a = d - 1; a >= 0; --a) {
          if (++t[a] < per) break;
          t[a] = 0;
        }
      }
    }
    rep.overlap_sup = std::max(rep.overlap_sup, overlap);

    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < samples_per_axis) break;
      idx[a] = 0;
    }
  }
  return rep;
}

double reverse_holder_constant(const GridFunction& f, std::span<const double> center,
                               double side, double q, double p) {
  SpatialBox box;
  box.center.assign(center.begin(), center.end());
  box.half_side.assign(center.size(), side / 2.0);
  WeightSpec w = WeightSpec::for_cube(center, side, f.grid().dims());
  double num = lp_norm(f, box, q, NormKind::local_avg);
  double den = lp_norm(f, box, p, NormKind::weighted_avg, &w);
  if (den == 0.0) return 0.0;
  return num / den;
}

}  // namespace declab
