#include "declab/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "declab/decoupling.hpp"
#include "declab/kakeya.hpp"
#include "declab/norms.hpp"

namespace declab {

namespace {
constexpr double kI1Lo = 0.0, kI1Hi = 0.25, kI2Lo = 0.5, kI2Hi = 1.0;
}

BilinearPair random_bilinear_pair(int freq_scale, int modes_per_column,
                                  std::uint64_t seed) {
  const double delta = std::pow(4.0, -freq_scale);
  Grid g = paraboloid_grid(delta, 2);
  const double L = g.axes[0].period;
  Rng rng(seed);

  auto make_side = [&](double lo, double hi) {
    std::vector<Mode> modes;
    std::int64_t k0 = std::int64_t(std::ceil(lo * L));
    std::int64_t k1 = std::int64_t(std::floor(hi * L - 1.0));
    for (std::int64_t kx = k0; kx <= k1; kx += 2) {
      double x = double(kx) / L;
      std::int64_t r0 = std::int64_t(std::ceil(x * x * L - 1e-9));
      std::int64_t r1 = std::int64_t(std::floor((x * x + delta) * L + 1e-9));
      for (int m = 0; m < modes_per_column; ++m) {
        std::int64_t kn = rng.uniform_int(r0, r1);
        modes.push_back(Mode{{kx, kn}, cplx{rng.normal(), rng.normal()}});
      }
    }
    return GridFunction::from_modes(g, modes);
  };

  BilinearPair pair;
  pair.freq_scale = freq_scale;
  pair.f1 = make_side(kI1Lo, kI1Hi);
  pair.f2 = make_side(kI2Lo, kI2Hi);
  return pair;
}

namespace {

struct StripSet {
  // one materialized subgrid function per interval, with |value|^q cached
  struct Strip {
    int side;
    GridFunction sub;
  };
  std::vector<Strip> strips;
};

StripSet build_strips(const BilinearPair& pair, int sigma, int oversample) {
  if (sigma < 2) throw std::invalid_argument("interval scale must satisfy sigma >= 2");
  StripSet out;
  const double ell = std::pow(2.0, -sigma);
  const GridFunction* fs[2] = {&pair.f1, &pair.f2};
  const double los[2] = {kI1Lo, kI2Lo}, his[2] = {kI1Hi, kI2Hi};
  const Grid& g = pair.f1.grid();
  for (int side = 0; side < 2; ++side) {
    auto modes = fs[side]->nonzero_modes();
    std::int64_t cells = std::int64_t(std::llround((his[side] - los[side]) / ell));
    for (std::int64_t c = 0; c < cells; ++c) {
      double lo = los[side] + c * ell, hi = lo + ell;
      std::vector<Mode> sub;
      for (const auto& m : modes) {
        double x = double(m.k[0]) / g.axes[0].period;
        bool last = (c == cells - 1);
        if (x >= lo - 1e-12 && (x < hi - 1e-12 || (last && x <= hi + 1e-12)))
          sub.push_back(m);
      }
      if (sub.empty()) continue;
      std::vector<std::int64_t> kmin(2), kmax(2);
      for (int a = 0; a < 2; ++a) kmin[a] = kmax[a] = sub[0].k[a];
      for (const auto& m : sub)
        for (int a = 0; a < 2; ++a) {
          kmin[a] = std::min(kmin[a], m.k[a]);
          kmax[a] = std::max(kmax[a], m.k[a]);
        }
      Grid sg;
      sg.axes.resize(2);
      for (int a = 0; a < 2; ++a) {
        std::int64_t want = (kmax[a] - kmin[a] + 1) * oversample;
        std::int64_t m2 = 1;
        while (m2 < want) m2 <<= 1;
        sg.axes[a] = Axis{g.axes[a].period, m2, kmin[a], g.axes[a].spatial_origin};
      }
      StripSet::Strip s;
      s.side = side;
      s.sub = GridFunction::from_modes(sg, sub);
      s.sub.ensure_spatial();
      out.strips.push_back(std::move(s));
    }
  }
  return out;
}

// weighted L^q average of a materialized strip against w adapted to the cube
// (center, side)
double strip_weighted_avg(const GridFunction& sub, double q,
                          std::span<const double> center, double side_len) {
  const Grid& g = sub.grid();
  WeightSpec w = WeightSpec::for_cube(center, side_len, 2);
  auto vals = sub.spatial();
  double acc = 0.0;
  std::vector<std::int64_t> idx(2, 0);
  std::vector<double> x(2);
  for (std::int64_t lin = 0; lin < g.total_samples(); ++lin) {
    x[0] = g.axes[0].coord(idx[0]);
    x[1] = g.axes[1].coord(idx[1]);
    acc += std::pow(std::abs(vals[lin]), q) * w.value(g, x);
    sub.bump_index(idx);
  }
  acc *= g.cell_volume() / (side_len * side_len);
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double compute_M(const BilinearPair& pair, double p, double q, int r, int sigma,
                 int big_r, int strip_oversample) {
  if (!(sigma <= r && r <= big_r)) throw std::invalid_argument("need sigma <= r <= R");
  StripSet strips = build_strips(pair, sigma, strip_oversample);
  const double side = std::pow(2.0, r);
  const std::int64_t per_axis = std::int64_t(1) << (big_r - r);
  const double q_half = std::pow(2.0, big_r - 1);

  double acc = 0.0;
  for (std::int64_t i = 0; i < per_axis; ++i) {
    for (std::int64_t j = 0; j < per_axis; ++j) {
      std::vector<double> c{-q_half + (i + 0.5) * side, -q_half + (j + 0.5) * side};
      double prod = 1.0;
      for (int sd = 0; sd < 2; ++sd) {
        double sq = 0.0;
        for (auto& s : strips.strips)
          if (s.side == sd) {
            double v = strip_weighted_avg(s.sub, q, c, side);
            sq += v * v;
          }
        prod *= std::pow(sq, p / 4.0);
      }
      acc += prod;
    }
  }
  acc /= double(per_axis * per_axis);
  return std::pow(acc, 1.0 / p);
}

LemmaReport check_H1(const BilinearPair& pair, double p, double q1, double q2, int r,
                     int sigma, int big_r) {
  if (q1 > q2) throw std::invalid_argument("need q1 <= q2");
  LemmaReport rep;
  rep.lhs = compute_M(pair, p, q1, r, sigma, big_r);
  rep.rhs = compute_M(pair, p, q2, r, sigma, big_r);
  rep.constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

LemmaReport check_H2(const BilinearPair& pair, double p, double q1, double q2,
                     double alpha, int r, int sigma, int big_r) {
  double qi = alpha / q1 + (1.0 - alpha) / q2;
  double q = 1.0 / qi;
  LemmaReport rep;
  rep.lhs = compute_M(pair, p, q, r, sigma, big_r);
  rep.rhs = std::pow(compute_M(pair, p, q1, r, sigma, big_r), alpha) *
            std::pow(compute_M(pair, p, q2, r, sigma, big_r), 1.0 - alpha);
  rep.constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

LemmaReport check_O(const BilinearPair& pair, double p, int r, int sigma, int big_r) {
  if (sigma > r) throw std::invalid_argument("need sigma <= r");
  LemmaReport rep;
  rep.lhs = compute_M(pair, p, 2.0, r, sigma, big_r);
  rep.rhs = compute_M(pair, p, 2.0, r, r, big_r);
  rep.constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

LemmaReport two_scale_check(const BilinearPair& pair, double p, int m, int r,
                            double eps) {
  if (p < 4.0) throw std::invalid_argument("two-scale step needs p >= 4");
  if (m > r) throw std::invalid_argument("need m <= r");
  const int big_r = 2 * r;
  const double kappa = (p - 4.0) / (p - 2.0);
  LemmaReport rep;
  rep.lhs = compute_M(pair, p, 2.0, m, m, big_r);
  double a = compute_M(pair, p, 2.0, 2 * m, 2 * m, big_r);
  double b = compute_M(pair, p, p, 2 * r, m, big_r);
  rep.rhs = std::pow(2.0, m * eps) * std::pow(a, 1.0 - kappa) * std::pow(b, kappa);
  rep.constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

LemmaReport bilinear_vs_M_check(const BilinearPair& pair, double p, int n_scale, int s) {
  const int sigma = n_scale >> s;
  if (sigma << s != n_scale) throw std::invalid_argument("n must be divisible by 2^s");
  const int big_r = 2 * n_scale;
  LemmaReport rep;
  // || |F1 F2|^{1/2} ||_{L^p_#} over the side-2^{2n} cube at the origin
  GridFunction a = pair.f1, b = pair.f2;
  a.ensure_spatial();
  b.ensure_spatial();
  const Grid& g = a.grid();
  auto va = a.spatial();
  auto vb = b.spatial();
  const double side = std::pow(2.0, big_r);
  double acc = 0.0;
  std::vector<std::int64_t> idx(2, 0);
  for (std::int64_t lin = 0; lin < g.total_samples(); ++lin) {
    double x0 = g.axes[0].coord(idx[0]), x1 = g.axes[1].coord(idx[1]);
    if (std::abs(x0) <= side / 2 && std::abs(x1) <= side / 2)
      acc += std::pow(std::abs(va[lin]) * std::abs(vb[lin]), p / 2.0);
    a.bump_index(idx);
  }
  rep.lhs = std::pow(acc * g.cell_volume() / (side * side), 1.0 / p);
  rep.rhs = std::pow(2.0, double(n_scale) / std::pow(2.0, s + 1)) *
            compute_M(pair, p, 2.0, sigma, sigma, big_r);
  rep.constant = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

Rational kappa_exact(const Rational& p) { return (p - Rational(4)) / (p - Rational(2)); }

double multiscale_iterate(double p, int s, std::span<const double> d_values) {
  if (int(d_values.size()) != s) throw std::invalid_argument("need one value per scale");
  const double kappa = (p - 4.0) / (p - 2.0);
  double prod = 1.0;
  for (int l = 1; l <= s; ++l)
    prod *= std::pow(d_values[l - 1], kappa * std::pow(1.0 - kappa, s - l));
  return prod;
}

std::string ExponentLedger::regime_name() const {
  switch (regime) {
    case PRegime::subcritical: return "subcritical";
    case PRegime::lower_critical: return "lower_critical";
    case PRegime::intermediate: return "intermediate";
    case PRegime::upper_critical: return "upper_critical";
    case PRegime::supercritical: return "supercritical";
  }
  return "?";
}

std::string ExponentLedger::to_json() const {
  auto rat = [](const Rational& r) {
    return "{\"num\":" + std::to_string(r.num()) + ",\"den\":" + std::to_string(r.den()) +
           "}";
  };
  std::string s = "{";
  s += "\"n\":" + std::to_string(n);
  s += ",\"p\":" + rat(p);
  s += ",\"kappa_p\":" + rat(kappa_p);
  s += ",\"A\":" + rat(A);
  s += ",\"B\":" + rat(B);
  s += ",\"C0\":" + rat(C0);
  s += ",\"sigma0\":" + rat(sigma0);
  s += ",\"regime\":\"" + regime_name() + "\"";
  s += std::string(",\"supported\":") + (supported ? "true" : "false");
  s += "}";
  return s;
}

ExponentLedger bootstrap_ch5(int n, const Rational& p) {
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  ExponentLedger led;
  led.n = n;
  led.p = p;
  led.kappa_p = kappa_exact(p);
  const Rational rn(n), one(1);
  led.A = one / (Rational(n - 1) * p) - one / (rn * p);
  led.B = Rational(1, 2 * n) - one / (Rational(n - 1) * p);
  const Rational p_lower = Rational(2 * n, n - 1);
  const Rational p_upper = Rational(2 * (n + 1), n - 1);
  if (p < p_lower) {
    led.regime = PRegime::subcritical;
    led.supported = false;
  } else if (p == p_lower) {
    led.regime = PRegime::lower_critical;
  } else if (p < p_upper) {
    led.regime = PRegime::intermediate;
  } else if (p == p_upper) {
    led.regime = PRegime::upper_critical;
  } else {
    led.regime = PRegime::supercritical;
  }
  Rational c0 = Rational(n + 1) / p - Rational(n - 1, 2);
  led.C0 = c0 > Rational(0) ? c0 : Rational(0);
  led.sigma0 = Rational(n - 1, 4) - Rational(n + 1) / (Rational(2) * p) + led.C0 / Rational(2);
  return led;
}

Ch3Bootstrap bootstrap_ch3(int s_max) {
  Ch3Bootstrap out;
  out.s_max = s_max;
  auto step = [&](double a, int s) {
    return a * (1.0 - double(s + 2) / std::pow(2.0, s + 1)) + std::pow(2.0, 1 - s);
  };
  double a = 0.5;
  out.trace.push_back(a);
  out.first_descending_s = 0;
  for (int s = 1; s <= s_max; ++s) {
    if (step(0.5, s) < 0.5) {
      out.first_descending_s = s;
      break;
    }
  }
  for (int it = 0; it < 20000; ++it) {
    double best = a;
    for (int s = 1; s <= s_max; ++s) best = std::min(best, step(a, s));
    if (a - best < 1e-15) break;
    a = best;
    out.trace.push_back(a);
  }
  for (int s = 1; s <= s_max; ++s) out.per_s_fixed_point.push_back(Rational(4, s + 2));
  out.floor_at_smax = Rational(4, s_max + 2);
  // fixed points 4/(s+2) decrease strictly to zero as s grows, so the
  // admissible infimum over unbounded s is exactly zero
  out.sigma0 = Rational(0);
  return out;
}

void export_bootstrap_csv(const Ch3Bootstrap& b, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "iteration,a_value\n";
  char buf[64];
  for (std::size_t i = 0; i < b.trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, b.trace[i]);
    os << buf;
  }
}

namespace {

int dyadic_band(double v) {
  int e;
  double m = std::frexp(v, &e);  // v = m * 2^e, m in [0.5, 1)
  (void)m;
  return e - 1;  // v in [2^{e-1}, 2^e)
}

struct PacketState {
  std::vector<PacketView> views;
};

double functional(const std::vector<PacketView>& views, int n_sides,
                  std::int64_t cell_count, double p,
                  const std::vector<std::int64_t>* cells = nullptr) {
  std::map<std::int64_t, std::vector<double>> mass;
  for (const auto& v : views) {
    auto& m = mass[v.cell];
    if (m.empty()) m.assign(n_sides, 0.0);
    m[v.side] += v.mag * v.mag;
  }
  (void)cell_count;
  double acc = 0.0;
  for (const auto& [cell, m] : mass) {
    if (cells &&
        std::find(cells->begin(), cells->end(), cell) == cells->end())
      continue;
    double prod = 1.0;
    for (int j = 0; j < n_sides; ++j) prod *= std::pow(m[j], p / (2.0 * n_sides));
    acc += prod;
  }
  return acc;
}

}  // namespace

PigeonholeBuckets pigeonhole_packets(std::span<const PacketView> views, int n_sides,
                                     std::int64_t cell_count, double p,
                                     int scale_index) {
  if (views.empty()) throw std::invalid_argument("empty packet set");
  PigeonholeBuckets out;
  out.scale_index = scale_index;
  out.sides.resize(n_sides);

  std::vector<PacketView> cur(views.begin(), views.end());
  const double total = functional(cur, n_sides, cell_count, p);

  std::int64_t stage1_classes = 0, stage2_classes = 0;

  // stage 1: dominant dyadic weight band per side
  for (int j = 0; j < n_sides; ++j) {
    std::map<int, std::vector<PacketView>> bands;
    for (const auto& v : cur)
      if (v.side == j) bands[dyadic_band(v.mag)].push_back(v);
    stage1_classes = std::max(stage1_classes, std::int64_t(bands.size()));
    double best = -1.0;
    int best_band = 0;
    for (const auto& [band, list] : bands) {
      std::vector<PacketView> trial;
      for (const auto& v : cur)
        if (v.side != j || dyadic_band(v.mag) == band) trial.push_back(v);
      double val = functional(trial, n_sides, cell_count, p);
      if (val > best) {
        best = val;
        best_band = band;
      }
    }
    std::vector<PacketView> next;
    for (const auto& v : cur)
      if (v.side != j || dyadic_band(v.mag) == best_band) next.push_back(v);
    cur = std::move(next);
    out.sides[j].h = std::ldexp(1.0, best_band);
  }

  // stage 2: dominant per-cap tube-count band per side
  for (int j = 0; j < n_sides; ++j) {
    std::map<std::int64_t, std::int64_t> cap_count;
    for (const auto& v : cur)
      if (v.side == j) ++cap_count[v.cap];
    std::map<int, std::vector<std::int64_t>> bands;
    for (const auto& [cap, cnt] : cap_count) bands[dyadic_band(double(cnt))].push_back(cap);
    stage2_classes = std::max(stage2_classes, std::int64_t(bands.size()));
    double best = -1.0;
    int best_band = 0;
    for (const auto& [band, caps] : bands) {
      std::vector<PacketView> trial;
      for (const auto& v : cur) {
        if (v.side != j) {
          trial.push_back(v);
        } else if (std::find(caps.begin(), caps.end(), v.cap) != caps.end()) {
          trial.push_back(v);
        }
      }
      double val = functional(trial, n_sides, cell_count, p);
      if (val > best) {
        best = val;
        best_band = band;
      }
    }
    const auto& keep = bands[best_band];
    std::vector<PacketView> next;
    for (const auto& v : cur)
      if (v.side != j || std::find(keep.begin(), keep.end(), v.cap) != keep.end())
        next.push_back(v);
    cur = std::move(next);
    out.sides[j].u = std::ldexp(1.0, best_band);
    out.sides[j].m = double(keep.size());
  }

  // stage 3: classify cells by per-side incidence bands (partition identity)
  std::map<std::int64_t, std::vector<std::int64_t>> cell_incidence;
  for (const auto& v : cur) {
    auto& m = cell_incidence[v.cell];
    if (m.empty()) m.assign(n_sides, 0);
    ++m[v.side];
  }
  std::map<std::vector<int>, std::vector<std::int64_t>> classes;
  for (const auto& [cell, inc] : cell_incidence) {
    std::vector<int> key(n_sides);
    for (int j = 0; j < n_sides; ++j) key[j] = inc[j] > 0 ? dyadic_band(double(inc[j])) : -10000;
    classes[key].push_back(cell);
  }
  double stage3_total = functional(cur, n_sides, cell_count, p);
  double sum_classes = 0.0, best = -1.0;
  std::vector<int> best_key;
  for (const auto& [key, cells] : classes) {
    double val = functional(cur, n_sides, cell_count, p, &cells);
    sum_classes += val;
    if (val > best) {
      best = val;
      best_key = key;
    }
  }
  out.conservation_gap =
      stage3_total > 0 ? std::abs(sum_classes - stage3_total) / stage3_total : 0.0;
  out.surviving_cells = classes[best_key];
  for (int j = 0; j < n_sides; ++j) {
    double per_cube = best_key[j] <= -10000 ? 0.0 : std::ldexp(1.0, best_key[j]);
    out.sides[j].beta = per_cube > 0 ? out.sides[j].m / per_cube : out.sides[j].m;
  }
  out.bucket_count = std::max<std::int64_t>(1, stage1_classes) *
                     std::max<std::int64_t>(1, stage2_classes) *
                     std::max<std::int64_t>(1, std::int64_t(classes.size()));
  out.discarded_fraction = total > 0 ? 1.0 - best / total : 0.0;
  return out;
}

std::vector<PacketView> packet_views(const WavePacketSet& set, int side,
                                     double cell_side, double domain_half,
                                     std::int64_t* cell_count) {
  const double rsq = std::sqrt(std::max(set.scale, 1.0));
  const std::int64_t per_axis =
      std::max<std::int64_t>(1, std::int64_t(std::ceil(2.0 * domain_half / cell_side)));
  std::int64_t total = 1;
  int d = 0;
  if (!set.packets.empty()) d = int(set.packets[0].tube.center_base.size());
  for (int a = 0; a < d; ++a) total *= per_axis;
  if (cell_count) *cell_count = total;

  std::vector<PacketView> out;
  for (const auto& pk : set.packets) {
    if (pk.coeff == cplx{}) continue;
    PacketView v;
    v.side = side;
    v.mag = std::abs(pk.coeff);
    std::int64_t cap = 0, cell = 0;
    bool ok = true;
    for (int a = 0; a < d; ++a) {
      cap = cap * 100003 + std::int64_t(std::llround(pk.tube.freq_center[a] * rsq)) + 50000;
      std::int64_t ci =
          std::int64_t(std::floor((pk.tube.center_base[a] + domain_half) / cell_side));
      if (ci < 0 || ci >= per_axis) ok = false;
      cell = cell * per_axis + ci;
    }
    if (!ok) continue;  // outside the bookkeeping domain
    v.cap = cap;
    v.cell = cell;
    out.push_back(v);
  }
  return out;
}

MultiscaleTrace synthetic_trace(int n, double big_r, double p, TraceKind kind,
                                std::uint64_t seed) {
  MultiscaleTrace tr;
  tr.n = n;
  tr.big_r = big_r;
  tr.p = p;
  tr.s = int(std::llround(std::log2(std::log2(big_r))));
  Rng rng(seed);

  double prev_cubes = 1.0;
  double prev_h = 1.0, prev_beta = 1.0, prev_m = 1.0;
  for (int k = 1; k <= tr.s; ++k) {
    TraceScale sc;
    const double caps_k = std::pow(big_r, (n - 1) * std::pow(2.0, -k));
    const double kakeya_cap = std::pow(big_r, (n - 1) * std::pow(2.0, -k));
    switch (kind) {
      case TraceKind::flat:
        sc.m = sc.u = sc.beta = 1.0;
        break;
      case TraceKind::sharp_counts:
        sc.m = std::max(1.0, std::round(caps_k / 4.0));
        sc.u = 1.0;
        sc.beta = sc.m;  // resonance: every cap meets the core cubes
        break;
      case TraceKind::random:
      case TraceKind::adversarial: {
        sc.m = std::max(1.0, std::round(rng.uniform(1.0, caps_k)));
        sc.u = std::round(rng.uniform(1.0, 8.0));
        double want_bu = kakeya_cap / rng.uniform(1.0, 64.0);
        sc.beta = std::max(1.0, std::min(sc.m, std::round(want_bu / sc.u)));
        break;
      }
    }
    // child cubes from incidence consistency, clamped to the geometric count
    double children_per_parent =
        std::min(sc.u * sc.beta * std::pow(big_r, std::pow(2.0, -k)),
                 std::pow(big_r, n * std::pow(2.0, -k)));
    sc.cubes_star = prev_cubes * children_per_parent;
    sc.cubes_star2 = sc.cubes_star;
    // weights from the two-scale L^2 budget, with slack recorded via h itself
    if (k == 1) {
      sc.h = 1.0;
    } else {
      double slack = (kind == TraceKind::random) ? rng.uniform(0.5, 1.0) : 1.0;
      sc.h = prev_h * std::pow(big_r, (n - 1) * std::pow(2.0, -(k + 1))) /
             std::sqrt(prev_beta * sc.u) * std::sqrt(prev_m / sc.m) * slack;
    }
    prev_cubes = sc.cubes_star2;
    prev_h = sc.h;
    prev_beta = sc.beta;
    prev_m = sc.m;
    tr.scales.push_back(sc);
  }
  return tr;
}

RelationReport verify_r1_r2_r3(const MultiscaleTrace& trace) {
  if (trace.scales.empty()) throw std::invalid_argument("incomplete trace");
  RelationReport rep;
  const int n = trace.n;
  const double R = trace.big_r;
  const double p = trace.p;

  for (int k = 1; k <= trace.s; ++k) {
    const TraceScale& sc = trace.scales[k - 1];
    const double tube_vol = std::pow(R, (n + 1) * std::pow(2.0, -k));
    // (r1): exact in the disjoint-tube model; constant = RHS / LHS
    // per side: LHS = M^{1/2} (N U h^p |T|)^{1/p}, N = parents at this scale
    const double parents = (k == 1) ? 1.0 : trace.scales[k - 2].cubes_star2;
    double lhs_side = std::sqrt(sc.m) *
                      std::pow(parents * sc.u * std::pow(sc.h, p) * tube_vol, 1.0 / p);
    double rhs_side = std::pow(R, (n + 1) / (std::pow(2.0, k) * p)) *
                      std::pow(parents, 1.0 / p) * std::sqrt(sc.m) * sc.h *
                      std::pow(sc.u, 1.0 / p);
    rep.r1_constants.push_back(rhs_side / lhs_side);

    // (r2): child-count growth against the direction/bush budget
    if (k < trace.s) {
      const TraceScale& nx = trace.scales[k];
      double lhs = std::pow(nx.cubes_star, double(n - 1));
      double rhs = std::pow(sc.cubes_star, double(n - 1)) *
                   std::pow(sc.beta * sc.u, double(n));
      rep.r2_constants.push_back(lhs / rhs);
    }

    // (r3): weight growth against the local-orthogonality budget
    if (k >= 2) {
      const TraceScale& pv = trace.scales[k - 2];
      double lhs = std::pow(sc.h / pv.h, double(n));
      double rhs = std::pow(R, n * (n - 1) * std::pow(2.0, -(k + 1))) /
                   std::pow(pv.beta, n / 2.0) / std::pow(sc.u, n / 2.0) *
                   std::pow(pv.m / sc.m, n / 2.0);
      rep.r3_constants.push_back(lhs / rhs);
    }
  }
  rep.worst = 0.0;
  for (double c : rep.r1_constants) rep.worst = std::max(rep.worst, c);
  for (double c : rep.r2_constants) rep.worst = std::max(rep.worst, c);
  for (double c : rep.r3_constants) rep.worst = std::max(rep.worst, c);
  return rep;
}

GoodScaleResult good_scale_search(std::span<const Rational> y_exponents,
                                  const Rational& a, const Rational& b,
                                  const Rational& c0, const Rational& eps, int n) {
  const int s = int(y_exponents.size());
  const Rational c = c0 + eps;
  for (int k = 1; k <= s; ++k) {
    Rational tail(0);
    for (int l = k + 1; l <= s; ++l) tail += y_exponents[l - 1];
    Rational lhs = y_exponents[k - 1] * a - b * tail;
    Rational rhs = c / Rational(std::int64_t(1) << k);
    if (lhs <= rhs) return GoodScale{k};
  }
  // no good scale: reproduce the forced lower bound on g_1
  GoodScaleRefutation ref;
  // back-substitution of the saturated recursion
  Rational g1 = y_exponents[0];
  ref.g1_lower_bound = g1;
  // closed form (C0+eps) 2^{-2}/A [ 2 + (B/A) sum_{j=0}^{s-2} ((1+B/A)/2)^j ]
  Rational ba = b / a;
  Rational term(1);
  Rational series(0);
  for (int j = 0; j <= s - 2; ++j) {
    series += term;
    term = term * (Rational(1) + ba) / Rational(2);
  }
  ref.series_closed_form =
      c * Rational(1, 4) / a * (Rational(2) + ba * series);
  ref.ceiling = Rational(std::int64_t(n) * (n - 1), 2);
  ref.contradiction = ref.g1_lower_bound > ref.ceiling;
  return ref;
}

std::vector<Rational> adversarial_y_exponents(int s, const Rational& a,
                                              const Rational& b, const Rational& c0,
                                              const Rational& eps) {
  const Rational c = c0 + eps;
  std::vector<Rational> g(s, Rational(0));
  for (int k = s; k >= 1; --k) {
    Rational tail(0);
    for (int l = k + 1; l <= s; ++l) tail += g[l - 1];
    // saturate the violated inequality with a strict margin
    g[k - 1] = (c / Rational(std::int64_t(1) << k) + b * tail) / a * Rational(33, 32);
  }
  return g;
}

}  // namespace declab
