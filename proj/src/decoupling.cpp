#include "declab/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "declab/bump.hpp"

namespace declab {

namespace {
constexpr double kTau = 6.28318530717958647692;

cplx unit_phase(double t) {
  double r = t - std::floor(t);
  return {std::cos(kTau * r), std::sin(kTau * r)};
}

int auto_oversample(double p) {
  double want = std::max(4.0, 2.0 * std::sqrt(std::max(p, 1.0)));
  int os = 4;
  while (os < want && os < 64) os <<= 1;
  return os;
}
}  // namespace

std::size_t partition_size(const DecouplingPartition& part) {
  if (const auto* caps = std::get_if<CapPartition>(&part)) return caps->caps.size();
  return std::get<std::vector<FrequencyRegion>>(part).size();
}

namespace {
bool piece_contains(const DecouplingPartition& part, std::size_t i,
                    std::span<const double> xi, double eps) {
  if (const auto* caps = std::get_if<CapPartition>(&part))
    return caps->caps[i].contains(xi);
  return std::get<std::vector<FrequencyRegion>>(part)[i].contains(xi, eps);
}
}  // namespace

std::vector<Mode> piece_modes(const GridFunction& f, const DecouplingPartition& part,
                              std::size_t i) {
  const Grid& g = f.grid();
  double eps = 0.0;
  for (const auto& ax : g.axes) eps = std::max(eps, 1e-6 * ax.freq_spacing());
  std::vector<Mode> out;
  std::vector<double> xi(g.dims());
  for (const auto& m : f.nonzero_modes()) {
    for (int a = 0; a < g.dims(); ++a) xi[a] = double(m.k[a]) / g.axes[a].period;
    if (piece_contains(part, i, xi, eps)) out.push_back(m);
  }
  return out;
}

namespace {

struct RatioParts {
  double numer = 0.0;
  double denom = 0.0;
};

RatioParts ratio_parts(const DecouplingInstance& inst, int piece_oversample,
                       int global_oversample) {
  const GridFunction& f = inst.f;
  const Grid& g = f.grid();
  double eps = 0.0;
  for (const auto& ax : g.axes) eps = std::max(eps, 1e-6 * ax.freq_spacing());

  auto modes = f.nonzero_modes();
  if (modes.empty()) throw std::domain_error("decoupling ratio undefined for F = 0");

  const std::size_t npieces = partition_size(inst.partition);
  std::vector<std::vector<Mode>> per_piece(npieces);
  std::vector<double> xi(g.dims());
  for (const auto& m : modes) {
    for (int a = 0; a < g.dims(); ++a) xi[a] = double(m.k[a]) / g.axes[a].period;
    bool placed = false;
    for (std::size_t i = 0; i < npieces && !placed; ++i) {
      if (piece_contains(inst.partition, i, xi, eps)) {
        per_piece[i].push_back(m);
        placed = true;
      }
    }
    if (!placed)
      throw std::domain_error("frequency support escapes the partition");
  }

  SpatialRegion region = AllPeriod{};
  std::optional<WeightSpec> w;
  NormKind kind = NormKind::local;
  if (inst.kind != RatioNormKind::global_period) {
    SpatialBox win = inst.window ? *inst.window : cube_at_origin(g.dims(), 1.0);
    region = win;
    if (inst.kind == RatioNormKind::weighted) {
      w = WeightSpec::for_cube(win.center, 2.0 * win.half_side[0], g.dims());
      kind = NormKind::weighted;
    }
  }

  RatioParts parts;
  int os = piece_oversample > 0 ? piece_oversample : auto_oversample(inst.p);
  double den_sq = 0.0;
  for (std::size_t i = 0; i < npieces; ++i) {
    if (per_piece[i].empty()) continue;  // empty pieces contribute zero
    double nrm = lp_norm_modes(g, per_piece[i], inst.p, os,
                               inst.kind == RatioNormKind::global_period ? nullptr : &region,
                               kind, w ? &*w : nullptr);
    den_sq += nrm * nrm;
  }
  parts.denom = std::sqrt(den_sq);
  if (inst.kind == RatioNormKind::global_period) {
    // same subgrid quadrature as the pieces, so one-piece quotients are 1
    parts.numer = lp_norm_modes(g, modes, inst.p, os * global_oversample);
  } else {
    parts.numer = lp_norm(f, region, inst.p, kind, w ? &*w : nullptr, global_oversample);
  }
  return parts;
}

}  // namespace

double decoupling_ratio(const DecouplingInstance& inst, int piece_oversample) {
  auto parts = ratio_parts(inst, piece_oversample, 1);
  if (parts.denom == 0.0) throw std::domain_error("decoupling ratio undefined: zero denominator");
  return parts.numer / parts.denom;
}

double decoupling_ratio_from_pieces(const Grid& g,
                                    std::span<const std::vector<Mode>> pieces,
                                    double p, int piece_oversample) {
  int os = piece_oversample > 0 ? piece_oversample : auto_oversample(p);
  double den_sq = 0.0;
  std::vector<Mode> all;
  for (const auto& piece : pieces) {
    if (piece.empty()) continue;
    double nrm = lp_norm_modes(g, piece, p, os);
    den_sq += nrm * nrm;
    all.insert(all.end(), piece.begin(), piece.end());
  }
  if (all.empty()) throw std::domain_error("decoupling ratio undefined for F = 0");
  if (den_sq == 0.0) throw std::domain_error("decoupling ratio undefined: zero denominator");
  double numer = lp_norm_modes(g, all, p, os);
  return numer / std::sqrt(den_sq);
}

GatedRatio decoupling_ratio_gated(const DecouplingInstance& inst) {
  auto coarse = ratio_parts(inst, 0, 1);
  auto fine = ratio_parts(inst, 2 * auto_oversample(inst.p), 2);
  GatedRatio out;
  out.ratio = fine.numer / fine.denom;
  out.numer_rel_change = std::abs(fine.numer - coarse.numer) / std::max(fine.numer, 1e-300);
  out.denom_rel_change = std::abs(fine.denom - coarse.denom) / std::max(fine.denom, 1e-300);
  out.accepted = out.numer_rel_change < 5e-3 && out.denom_rel_change < 5e-3;
  return out;
}

Grid paraboloid_grid(double delta, int n_dims) {
  double L = 4.0 / delta;
  std::int64_t Lk = std::int64_t(std::llround(L));
  Grid g;
  g.axes.resize(n_dims);
  for (int a = 0; a < n_dims - 1; ++a) g.axes[a] = Axis{L, Lk, 0, -L / 2};
  g.axes[n_dims - 1] = Axis{L, 2 * Lk, 0, -L / 2};
  return g;
}

namespace {

// bump scaled so that support is exactly [lo, hi] and plateau the middle half
double scaled_bump(const SmoothBump& psi, double x, double lo, double hi) {
  double c = 0.5 * (lo + hi), w = hi - lo;
  return psi((x - c) * (4.0 / 3.0) / w);
}

GridFunction sharp_from_multipliers(double delta, int n_dims,
                                    std::span<const cplx> mult) {
  Grid g = paraboloid_grid(delta, n_dims);
  CapPartition caps = cap_partition(delta, n_dims);
  if (mult.size() != caps.caps.size())
    throw std::invalid_argument("one multiplier per cap required");
  SmoothBump psi = build_bump();
  const int d = n_dims - 1;
  const double L = g.axes[0].period;
  const double w = std::sqrt(delta);
  const std::int64_t per_axis = std::int64_t(std::llround(1.0 / w));
  const double cell = std::pow(1.0 / L, n_dims);  // density -> coefficient

  GridFunction f = GridFunction::zeros(g);
  auto coeffs = f.mutable_freq();

  std::vector<std::int64_t> kbar(d, 0);
  const std::int64_t base_n = g.axes[0].samples;
  std::int64_t base_total = 1;
  for (int a = 0; a < d; ++a) base_total *= base_n;

  std::vector<std::int64_t> k(n_dims);
  for (std::int64_t lin = 0; lin < base_total; ++lin) {
    double r2 = 0.0;
    double horiz = 1.0;
    std::int64_t cap_lin = 0;
    bool in_base = true;
    for (int a = 0; a < d && in_base; ++a) {
      double xi = double(kbar[a]) / L;
      std::int64_t cell_idx = std::int64_t(std::floor(xi / w + 1e-12));
      if (cell_idx < 0 || cell_idx >= per_axis) in_base = false;
      cap_lin = cap_lin * per_axis + cell_idx;
      r2 += xi * xi;
    }
    if (in_base) {
      const Cap& cap = caps.caps[cap_lin];
      for (int a = 0; a < d; ++a) {
        double xi = double(kbar[a]) / L;
        horiz *= scaled_bump(psi, xi, cap.tau_lo[a], cap.tau_hi[a]);
      }
      if (horiz != 0.0) {
        std::int64_t k_lo = std::int64_t(std::ceil(r2 * L - 1e-9));
        std::int64_t k_hi = std::int64_t(std::ceil((r2 + delta) * L - 1e-9));  // exclusive
        for (std::int64_t kn = k_lo; kn < k_hi; ++kn) {
          double t = double(kn) / L - r2;
          double vert = scaled_bump(psi, t, 0.0, delta);
          if (vert == 0.0) continue;
          for (int a = 0; a < d; ++a) k[a] = kbar[a];
          k[d] = kn;
          if (f.in_band(k))
            coeffs[f.linear_index(k)] = mult[cap_lin] * (horiz * vert * cell);
        }
      }
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++kbar[a] < base_n) break;
      kbar[a] = 0;
    }
  }
  f.invalidate_spatial();
  return f;
}

}  // namespace

GridFunction sharp_example(double delta, int n_dims) {
  CapPartition caps = cap_partition(delta, n_dims);
  std::vector<cplx> ones(caps.caps.size(), cplx{1.0, 0.0});
  return sharp_from_multipliers(delta, n_dims, ones);
}

GridFunction modulated_sharp_example(double delta, int n_dims,
                                     std::span<const cplx> cap_multipliers) {
  return sharp_from_multipliers(delta, n_dims, cap_multipliers);
}

namespace {

// |F|^p summed over a uniform panel [-half, half]^2 at `per_axis` points per
// axis, by direct trig-polynomial evaluation (row-factored); n = 2 only.
double panel_power_sum(const GridFunction& f, double p, double half, int per_axis,
                       double* cellvol) {
  const Grid& g = f.grid();
  auto modes = f.nonzero_modes();
  const double L0 = g.axes[0].period, L1 = g.axes[1].period;
  const double h = 2.0 * half / per_axis;
  *cellvol = h * h;

  // group modes by k0 row
  std::map<std::int64_t, std::vector<Mode>> rows;
  for (auto& m : modes) rows[m.k[0]].push_back(m);

  // g_{k0}(x1) on the panel's x1 mesh
  std::vector<std::int64_t> row_keys;
  for (auto& kv : rows) row_keys.push_back(kv.first);
  std::vector<std::vector<cplx>> gvals(row_keys.size(), std::vector<cplx>(per_axis));
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    const auto& mv = rows[row_keys[r]];
    for (int j = 0; j < per_axis; ++j) {
      double x1 = -half + (j + 0.5) * h;
      cplx s{};
      for (const auto& m : mv) s += m.coeff * unit_phase(double(m.k[1]) / L1 * x1);
      gvals[r][j] = s;
    }
  }
  double acc = 0.0;
  for (int i = 0; i < per_axis; ++i) {
    double x0 = -half + (i + 0.5) * h;
    std::vector<cplx> col(per_axis, cplx{});
    for (std::size_t r = 0; r < row_keys.size(); ++r) {
      cplx ph = unit_phase(double(row_keys[r]) / L0 * x0);
      for (int j = 0; j < per_axis; ++j) col[j] += ph * gvals[r][j];
    }
    for (int j = 0; j < per_axis; ++j) acc += std::pow(std::abs(col[j]), p);
  }
  return acc;
}

}  // namespace

SharpRatioResult sharp_example_ratio(double delta, double p, int n_dims) {
  if (n_dims != 2) throw std::invalid_argument("refined sharp ratio implemented for n = 2");
  SharpRatioResult out;
  out.delta = delta;
  out.p = p;

  GridFunction f = sharp_example(delta, n_dims);
  const Grid& g = f.grid();
  CapPartition caps = cap_partition(delta, n_dims);

  // denominator: per-cap norms on modulated subgrids
  int os = auto_oversample(p);
  DecouplingPartition part = caps;
  double den_sq = 0.0;
  for (std::size_t i = 0; i < caps.caps.size(); ++i) {
    auto pm = piece_modes(f, part, i);
    double nrm = lp_norm_modes(g, pm, p, os);
    den_sq += nrm * nrm;
  }
  const double denom = std::sqrt(den_sq);

  // numerator: coarse grid sum with an origin panel refined by direct
  // evaluation (the resonant peak lives on unit scale, far below the cell
  // size of the large-period grid)
  const double panel_half = 2.0;
  f.ensure_spatial();
  auto vals = f.spatial();
  double coarse_all = 0.0, coarse_in_panel = 0.0;
  {
    std::vector<std::int64_t> idx(2, 0);
    for (std::int64_t lin = 0; lin < g.total_samples(); ++lin) {
      double v = std::pow(std::abs(vals[lin]), p);
      coarse_all += v;
      double x0 = g.axes[0].coord(idx[0]), x1 = g.axes[1].coord(idx[1]);
      if (std::abs(x0) <= panel_half && std::abs(x1) <= panel_half) coarse_in_panel += v;
      f.bump_index(idx);
    }
  }
  double cell = g.cell_volume();
  out.numer_coarse = std::pow(coarse_all * cell, 1.0 / p);

  double panel_cell = 0.0;
  double panel = panel_power_sum(f, p, panel_half, 192, &panel_cell);
  double panel_cell2 = 0.0;
  double panel2 = panel_power_sum(f, p, panel_half, 384, &panel_cell2);
  double refined_pow = (coarse_all - coarse_in_panel) * cell + panel2 * panel_cell2;
  out.numer_refined = std::pow(refined_pow, 1.0 / p);
  double p1 = panel * panel_cell, p2 = panel2 * panel_cell2;
  out.panel_rel_change = std::abs(p1 - p2) / std::max(p2, 1e-300);
  out.ratio = out.numer_refined / denom;
  return out;
}

double fit_log_slope(std::span<const double> deltas, std::span<const double> ratios) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = int(deltas.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(1.0 / deltas[i]);
    double y = std::log(ratios[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double LowerBoundWitness::replay() const {
  GridFunction f = modulated_sharp_example(delta, n_dims, cap_multipliers);
  DecouplingInstance inst{std::move(f), cap_partition(delta, n_dims), p,
                          RatioNormKind::global_period, std::nullopt};
  return decoupling_ratio(inst);
}

LowerBoundWitness search_lower_bound(double delta, double p, int n_dims,
                                     SearchStrategy strategy, int budget,
                                     std::uint64_t seed) {
  if (budget <= 0) throw std::invalid_argument("budget must be positive");
  CapPartition caps = cap_partition(delta, n_dims);
  const std::size_t nc = caps.caps.size();
  Rng rng(seed);

  int evals = 0;
  auto evaluate = [&](std::span<const cplx> mult) -> double {
    ++evals;
    GridFunction f = modulated_sharp_example(delta, n_dims, mult);
    DecouplingInstance inst{std::move(f), caps, p, RatioNormKind::global_period,
                            std::nullopt};
    return decoupling_ratio(inst);
  };

  LowerBoundWitness best;
  best.seed = seed;
  best.delta = delta;
  best.p = p;
  best.n_dims = n_dims;
  best.value = -1.0;

  auto consider = [&](std::span<const cplx> mult, const std::string& name) {
    if (evals >= budget) return;
    double v = evaluate(mult);
    if (v > best.value) {
      best.value = v;
      best.generator = name;
      best.cap_multipliers.assign(mult.begin(), mult.end());
    }
  };

  const bool all = strategy == SearchStrategy::all;

  if (all || strategy == SearchStrategy::single_cap) {
    std::vector<cplx> m(nc, cplx{});
    m[0] = 1.0;
    consider(m, "single_cap");
  }
  if (all || strategy == SearchStrategy::sharp_seed) {
    std::vector<cplx> m(nc, cplx{1.0, 0.0});
    consider(m, "sharp_example");
  }
  if (all || strategy == SearchStrategy::random_coeffs) {
    int tries = std::max(1, budget / 8);
    for (int t = 0; t < tries && evals < budget; ++t) {
      std::vector<cplx> m(nc);
      for (auto& c : m) c = cplx{rng.normal(), rng.normal()};
      consider(m, "random_search");
    }
  }
  if (all || strategy == SearchStrategy::coordinate_ascent) {
    const int restarts = 20;
    for (int r = 0; r < restarts && evals < budget; ++r) {
      std::vector<cplx> cur(nc);
      if (r == 0 && best.value > 0) {
        cur = best.cap_multipliers;
      } else {
        for (auto& c : cur) c = cplx{rng.normal(), rng.normal()};
      }
      double cur_v;
      {
        if (evals >= budget) break;
        cur_v = evaluate(cur);
        if (cur_v > best.value) {
          best.value = cur_v;
          best.generator = "coordinate_ascent";
          best.cap_multipliers = cur;
        }
      }
      bool improved = true;
      while (improved && evals < budget) {
        improved = false;
        for (std::size_t i = 0; i < nc && evals < budget; ++i) {
          const cplx steps[4] = {cplx{2.0, 0.0}, cplx{0.5, 0.0},
                                 unit_phase(1.0 / 16.0), unit_phase(-1.0 / 16.0)};
          for (const auto& s : steps) {
            if (evals >= budget) break;
            std::vector<cplx> cand = cur;
            cand[i] *= s;
            double v = evaluate(cand);
            if (v > cur_v + 1e-12) {
              cur = cand;
              cur_v = v;
              improved = true;
              if (v > best.value) {
                best.value = v;
                best.generator = "coordinate_ascent";
                best.cap_multipliers = cur;
              }
            }
          }
        }
      }
    }
  }
  return best;
}

double bilinear_ratio(const GridFunction& f1, const GridFunction& f2, int scale_n,
                      double p) {
  const Grid& g = f1.grid();
  if (!g.same_layout(f2.grid())) throw std::invalid_argument("grid mismatch");
  if (g.dims() != 2) throw std::invalid_argument("bilinear quotient implemented for n = 2");
  const double delta = std::pow(4.0, -scale_n);
  const double ilo[2] = {0.0, 0.5};
  const double ihi[2] = {0.25, 1.0};

  const GridFunction* fs[2] = {&f1, &f2};
  for (int i = 0; i < 2; ++i) {
    for (const auto& m : fs[i]->nonzero_modes()) {
      double x = double(m.k[0]) / g.axes[0].period;
      double t = double(m.k[1]) / g.axes[1].period - x * x;
      if (x < ilo[i] - 1e-12 || x > ihi[i] + 1e-12 || t < -1e-12 || t > delta + 1e-12)
        throw std::domain_error("support escapes the bilinear strips");
    }
  }

  // numerator || |F1 F2|^{1/2} ||_p over the period
  GridFunction a = f1, b = f2;
  a.ensure_spatial();
  b.ensure_spatial();
  auto va = a.spatial();
  auto vb = b.spatial();
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i)
    acc += std::pow(std::abs(va[i]) * std::abs(vb[i]), p / 4.0);
  double numer = std::pow(acc * g.cell_volume(), 1.0 / p);

  // denominator: per-interval square sums at length 2^{-scale_n}
  const double ell = std::pow(2.0, -scale_n);
  double prod = 1.0;
  for (int i = 0; i < 2; ++i) {
    auto modes = fs[i]->nonzero_modes();
    std::int64_t cells = std::int64_t(std::llround((ihi[i] - ilo[i]) / ell));
    double sq = 0.0;
    for (std::int64_t c = 0; c < cells; ++c) {
      double lo = ilo[i] + c * ell, hi = lo + ell;
      std::vector<Mode> sub;
      for (const auto& m : modes) {
        double x = double(m.k[0]) / g.axes[0].period;
        if (x >= lo - 1e-12 && x < hi - 1e-12) sub.push_back(m);
      }
      if (sub.empty()) continue;
      double nrm = lp_norm_modes(g, sub, p, auto_oversample(p));
      sq += nrm * nrm;
    }
    prod *= sq;
  }
  double denom = std::pow(prod, 0.25);
  if (denom == 0.0) throw std::domain_error("bilinear denominator vanishes");
  return numer / denom;
}

BroadNarrowSplit broad_narrow_split(std::span<const cplx> z) {
  const int K = int(z.size());
  if (K < 2) throw std::invalid_argument("need at least two cells");
  BroadNarrowSplit out;
  cplx total{};
  int istar = 0;
  for (int i = 0; i < K; ++i) {
    total += z[i];
    if (std::abs(z[i]) > std::abs(z[istar])) istar = i;
  }
  out.alpha_star = istar;
  out.lhs = std::abs(total);
  const double zstar = std::abs(z[istar]);

  bool far_big = false;
  for (int i = 0; i < K; ++i) {
    if (std::abs(i - istar) > 1 && std::abs(z[i]) >= zstar / double(K)) far_big = true;
  }
  if (!far_big) {
    out.kind = BroadNarrowSplit::Case::concentrated;
    out.bound = 4.0 * zstar;
  } else {
    out.kind = BroadNarrowSplit::Case::bilinear;
    double bestp = -1.0;
    for (int i = 0; i < K; ++i) {
      for (int j = i + 2; j < K; ++j) {
        double v = std::abs(z[i]) * std::abs(z[j]);
        if (v > bestp) {
          bestp = v;
          out.pair_first = i;
          out.pair_second = j;
        }
      }
    }
    out.bound = std::pow(double(K), 1.5) * std::sqrt(bestp);
  }
  out.holds = out.lhs <= out.bound * (1.0 + 1e-12) + 1e-300;
  return out;
}

}  // namespace declab
