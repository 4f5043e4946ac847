#include "declab/pointmass.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "declab/bump.hpp"
#include "declab/decoupling.hpp"
#include "declab/norms.hpp"
#include "declab/regions.hpp"
#include "declab/rng.hpp"

namespace declab {

int PointMassConfig::num_sets() const {
  int m = 0;
  for (int a : assignment) m = std::max(m, a + 1);
  return m;
}

std::string GenericityViolation::describe() const {
  auto fmt = [](const std::vector<int>& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
    return s + ")";
  };
  return "colliding k-fold sums from point tuples " + fmt(tuple_a) + " and " + fmt(tuple_b);
}

namespace {

// nondecreasing index multisets of size k over {0..n-1}
void multisets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(k, 0);
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - 1) --i;
    if (i < 0) return;
    int v = cur[i] + 1;
    for (int j = i; j < k; ++j) cur[j] = v;
  }
}

std::vector<Rational> multiset_sum(const PointMassConfig& cfg, const std::vector<int>& ms) {
  std::vector<Rational> s(cfg.points[0].size(), Rational(0));
  for (int idx : ms)
    for (std::size_t a = 0; a < s.size(); ++a) s[a] += cfg.points[idx][a];
  return s;
}

std::uint64_t multiset_orderings(const std::vector<int>& ms) {
  // k! / prod (multiplicities!)
  std::uint64_t fact = 1;
  for (std::size_t i = 2; i <= ms.size(); ++i) fact *= i;
  std::uint64_t denom = 1;
  std::size_t i = 0;
  while (i < ms.size()) {
    std::size_t j = i;
    while (j < ms.size() && ms[j] == ms[i]) ++j;
    std::uint64_t f = 1;
    for (std::size_t u = 2; u <= j - i; ++u) f *= u;
    denom *= f;
    i = j;
  }
  return fact / denom;
}

struct RationalVecLess {
  bool operator()(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return false;
  }
};

}  // namespace

std::optional<GenericityViolation> genericity_violation(const PointMassConfig& cfg) {
  const int n = int(cfg.points.size());
  std::vector<std::vector<int>> ms;
  multisets(n, cfg.k, ms);
  std::map<std::vector<Rational>, std::vector<int>, RationalVecLess> seen;
  for (const auto& m : ms) {
    auto s = multiset_sum(cfg, m);
    auto [it, fresh] = seen.emplace(s, m);
    if (!fresh) return GenericityViolation{it->second, m};
  }
  return std::nullopt;
}

std::uint64_t exp_sum_moment(const PointMassConfig& cfg,
                             const std::vector<int>* subset_filter) {
  if (auto v = genericity_violation(cfg))
    throw std::domain_error("degenerate configuration: " + v->describe());
  std::vector<int> keep;
  for (int i = 0; i < int(cfg.points.size()); ++i) {
    if (!subset_filter ||
        std::find(subset_filter->begin(), subset_filter->end(), i) != subset_filter->end())
      keep.push_back(i);
  }
  if (keep.empty()) return 0;
  // genericity: r(s) = number of orderings of the unique multiset for s
  std::vector<std::vector<int>> ms;
  multisets(int(keep.size()), cfg.k, ms);
  std::uint64_t total = 0;
  for (const auto& m : ms) {
    std::uint64_t r = multiset_orderings(m);
    total += r * r;
  }
  return total;
}

double PointMassBound::value() const {
  double num = std::pow(double(moment_all), 1.0 / double(p));
  double den = 0.0;
  for (auto m : moment_per_set) den += std::pow(double(m), 2.0 / double(p));
  return num / std::sqrt(den);
}

std::string PointMassBound::expression() const {
  std::string s = std::to_string(moment_all) + "^(1/" + std::to_string(p) + ") / (";
  for (std::size_t i = 0; i < moment_per_set.size(); ++i) {
    if (i) s += " + ";
    s += std::to_string(moment_per_set[i]) + "^(2/" + std::to_string(p) + ")";
  }
  return s + ")^(1/2)";
}

PointMassBound point_mass_lower_bound(const PointMassConfig& cfg) {
  if (cfg.num_sets() < 2) {
    // all mass in one set: the quotient is exactly 1
  }
  if (cfg.k < 2) throw std::invalid_argument("k must be >= 2");
  PointMassBound b;
  b.p = 2 * cfg.k;
  b.moment_all = exp_sum_moment(cfg);
  for (int s = 0; s < cfg.num_sets(); ++s) {
    std::vector<int> members;
    for (int i = 0; i < int(cfg.points.size()); ++i)
      if (cfg.assignment[i] == s) members.push_back(i);
    b.moment_per_set.push_back(exp_sum_moment(cfg, &members));
  }
  return b;
}

PointMassConfig three_point_config() {
  PointMassConfig cfg;
  cfg.k = 3;
  // generic rational points: all 10 three-fold sums distinct
  cfg.points = {
      {Rational(13, 64), Rational(27, 64)},
      {Rational(41, 64), Rational(9, 64)},
      {Rational(29, 64), Rational(55, 64)},
  };
  cfg.assignment = {0, 0, 1};
  return cfg;
}

PointMassConfig random_generic_config(int num_points, int dims, int k,
                                      const std::vector<int>& assignment,
                                      std::uint64_t seed) {
  Rng rng(seed);
  PointMassConfig cfg;
  cfg.k = k;
  cfg.assignment = assignment;
  const std::int64_t den = 1 << 12;
  for (int attempt = 0; attempt < 64; ++attempt) {
    cfg.points.clear();
    for (int i = 0; i < num_points; ++i) {
      std::vector<Rational> pt;
      for (int a = 0; a < dims; ++a) {
        std::int64_t num = 2 * rng.uniform_int(1, den / 2 - 1) + 1;  // odd
        pt.emplace_back(num, den);
      }
      cfg.points.push_back(std::move(pt));
    }
    if (!genericity_violation(cfg)) return cfg;
  }
  throw std::runtime_error("could not sample a generic configuration");
}

PointMassGridCheck point_mass_grid_check(const PointMassConfig& cfg, double epsilon,
                                         std::int64_t samples_per_axis) {
  const int d = int(cfg.points[0].size());
  if (d != 2) throw std::invalid_argument("grid check implemented for planar points");
  const int p = 2 * cfg.k;

  // bumps must stay disjoint, and so must the k-fold sum clusters
  {
    double min_gap = 1e300;
    for (std::size_t i = 0; i < cfg.points.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.points.size(); ++j) {
        double g = 0.0;
        for (int a = 0; a < d; ++a) {
          double dd = (cfg.points[i][a] - cfg.points[j][a]).to_double();
          g += dd * dd;
        }
        min_gap = std::min(min_gap, std::sqrt(g));
      }
    if (min_gap <= (4.0 / 3.0) * epsilon)
      throw std::domain_error("epsilon too large: bumps overlap");
  }

  // period 4/epsilon, matching the dual scale of the bumps
  double L = 4.0 / epsilon;
  Grid g;
  g.axes.assign(2, Axis{L, samples_per_axis, 0, -L / 2});

  SmoothBump psi = build_bump();
  const double cell = 1.0 / (L * L);
  std::vector<Mode> modes;
  std::vector<FrequencyRegion> regions(cfg.num_sets());
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    double cx = cfg.points[i][0].to_double();
    double cy = cfg.points[i][1].to_double();
    FreqBox box;
    box.lo = {cx - epsilon, cy - epsilon};
    box.hi = {cx + epsilon, cy + epsilon};
    box.id = "pt" + std::to_string(i);
    regions[cfg.assignment[i]].boxes.push_back(box);
    std::int64_t kx0 = std::int64_t(std::ceil((cx - epsilon) * L));
    std::int64_t ky0 = std::int64_t(std::ceil((cy - epsilon) * L));
    std::int64_t kx1 = std::int64_t(std::floor((cx + epsilon) * L));
    std::int64_t ky1 = std::int64_t(std::floor((cy + epsilon) * L));
    for (std::int64_t kx = kx0; kx <= kx1; ++kx) {
      for (std::int64_t ky = ky0; ky <= ky1; ++ky) {
        double vx = psi((double(kx) / L - cx) / epsilon);
        double vy = psi((double(ky) / L - cy) / epsilon);
        if (vx * vy != 0.0) modes.push_back(Mode{{kx, ky}, cplx{vx * vy * cell, 0.0}});
      }
    }
  }

  GridFunction f = GridFunction::from_modes(g, modes);
  DecouplingInstance inst{std::move(f), regions, double(p), RatioNormKind::global_period,
                          std::nullopt};
  PointMassGridCheck out;
  out.ratio = decoupling_ratio(inst);
  out.exact = point_mass_lower_bound(cfg).value();
  out.rel_gap = std::abs(out.ratio - out.exact) / out.exact;
  return out;
}

}  // namespace declab
