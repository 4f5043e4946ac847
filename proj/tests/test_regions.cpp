#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "declab/decoupling.hpp"
#include "declab/norms.hpp"
#include "declab/regions.hpp"
#include "declab/rng.hpp"

using namespace declab;

TEST_CASE("cap partition counts and tiling") {
  SUBCASE("delta = 1/4, n = 2 gives two caps over the half-open halves") {
    auto part = cap_partition(0.25, 2);
    REQUIRE(part.caps.size() == 2);
    CHECK(part.caps[0].tau_lo[0] == 0.0);
    CHECK(part.caps[0].tau_hi[0] == 0.5);
    CHECK(part.caps[1].tau_lo[0] == 0.5);
    CHECK(part.caps[1].tau_hi[0] == 1.0);
  }
  SUBCASE("delta = 1 degenerates to a single cap") {
    auto part = cap_partition(1.0, 2);
    CHECK(part.caps.size() == 1);
  }
  SUBCASE("delta = 1/16, n = 3 gives a 4x4 subdivision") {
    auto part = cap_partition(1.0 / 16.0, 3);
    CHECK(part.caps.size() == 16);
  }
  SUBCASE("counts match the dyadic formula") {
    for (int n : {2, 3}) {
      for (double delta : {1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0}) {
        auto part = cap_partition(delta, n);
        CHECK(std::int64_t(part.caps.size()) == expected_cap_count(delta, n));
      }
    }
  }
  SUBCASE("base cubes tile the unit cube exactly") {
    auto part = cap_partition(1.0 / 16.0, 2);
    double covered = 0.0;
    for (const auto& c : part.caps) covered += c.tau_hi[0] - c.tau_lo[0];
    CHECK(covered == 1.0);
    // half-open membership: each sampled point lies in exactly one cap base
    for (int i = 0; i < 97; ++i) {
      double xi = (i + 0.25) / 97.0;
      int hits = 0;
      for (const auto& c : part.caps)
        if (xi >= c.tau_lo[0] && xi < c.tau_hi[0]) ++hits;
      CHECK(hits == 1);
    }
  }
  SUBCASE("non-dyadic delta rejected") {
    CHECK_THROWS_AS(cap_partition(0.3, 2), std::invalid_argument);
    CHECK_THROWS_AS(cap_partition(0.5, 2), std::invalid_argument);  // sqrt not dyadic
  }
}

TEST_CASE("projection behaves like the identity on full cover and splits linearly") {
  GridFunction f = sharp_example(0.25, 2);
  auto part = cap_partition(0.25, 2);

  FrequencyRegion all;
  FreqBox big;
  big.lo = {0.0, 0.0};
  big.hi = {1.0, 1.5};
  all.boxes.push_back(big);
  GridFunction pf = project(f, all);
  double diff = 0.0;
  auto a = f.freq();
  auto b = pf.freq();
  for (std::size_t i = 0; i < a.size(); ++i) diff += std::norm(a[i] - b[i]);
  CHECK(diff == 0.0);

  GridFunction p0 = project(f, part.caps[0]);
  GridFunction p1 = project(f, part.caps[1]);
  // disjoint pieces covering the support: exact splitting
  auto c0 = p0.freq();
  auto c1 = p1.freq();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == c0[i] + c1[i]);
  // orthogonality in coefficient space is exact
  CHECK(std::abs(inner_product(p0, p1)) == 0.0);
  // idempotent
  GridFunction p00 = project(p0, part.caps[0]);
  auto cc = p00.freq();
  for (std::size_t i = 0; i < cc.size(); ++i) CHECK(cc[i] == c0[i]);
}

TEST_CASE("projection is self-adjoint for the discrete inner product") {
  Grid g = make_uniform_grid(2, 8.0, 32);
  Rng rng(3);
  auto f = GridFunction::from_spatial(
      g, [&](std::span<const double>) { return cplx{rng.normal(), rng.normal()}; });
  auto h = GridFunction::from_spatial(
      g, [&](std::span<const double>) { return cplx{rng.normal(), rng.normal()}; });
  FrequencyRegion u;
  FreqBox box;
  box.lo = {0.5, 1.0};
  box.hi = {2.0, 3.0};
  u.boxes.push_back(box);
  auto lhs = inner_product(project(f, u), h);
  auto rhs = inner_product(f, project(h, u));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("region outside the resolvable band is rejected") {
  Grid g = make_uniform_grid(2, 4.0, 16);  // band [0, 4)
  GridFunction f = GridFunction::zeros(g);
  FrequencyRegion u;
  FreqBox box;
  box.lo = {-1.0, 0.0};
  box.hi = {0.5, 1.0};
  u.boxes.push_back(box);
  CHECK_THROWS_AS(project(f, u), std::domain_error);
}

TEST_CASE("parabolic rescaling map") {
  SUBCASE("c = 0, sigma = 1 is the identity") {
    std::vector<double> c{0.0};
    auto t = parabolic_map(c, 1.0);
    std::vector<double> xi{0.3, 0.7};
    auto y = t.apply(xi);
    CHECK(y[0] == doctest::Approx(0.3));
    CHECK(y[1] == doctest::Approx(0.7));
  }
  SUBCASE("the point on the parabola above the center maps to the origin") {
    std::vector<double> c{0.5};
    auto t = parabolic_map(c, 0.25);
    std::vector<double> xi{0.5, 0.25};
    auto y = t.apply(xi);
    CHECK(std::abs(y[0]) < 1e-14);
    CHECK(std::abs(y[1]) < 1e-14);
  }
  SUBCASE("cap corners land inside the rescaled neighborhood structure") {
    std::vector<double> c{0.5};
    auto t = parabolic_map(c, 0.25);
    double delta = 1.0 / 16.0;
    for (double xi : {0.5, 0.625, 0.75}) {
      for (double tt : {0.0, delta}) {
        std::vector<double> pt{xi, xi * xi + tt};
        auto y = t.apply(pt);
        double resid = y[1] - y[0] * y[0];
        CHECK(y[0] >= -1e-12);
        CHECK(y[0] <= 0.5 + 1e-12);
        CHECK(resid >= -1e-12);
        CHECK(resid <= delta / 0.25 + 1e-12);
      }
    }
  }
  SUBCASE("invalid sigma rejected") {
    std::vector<double> c{0.0};
    CHECK_THROWS_AS(parabolic_map(c, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(parabolic_map(c, 2.0), std::invalid_argument);
  }
  SUBCASE("inverse composes to the identity") {
    std::vector<double> c{0.25, 0.5};
    auto t = parabolic_map(c, 0.25);
    auto ti = t.inverse();
    std::vector<double> xi{0.3, 0.6, 0.41};
    auto y = ti.apply(t.apply(xi));
    for (int a = 0; a < 3; ++a) CHECK(std::abs(y[a] - xi[a]) < 1e-12);
  }
}

TEST_CASE("affine coefficient transport") {
  Grid g = make_uniform_grid(2, 8.0, 64);
  g.axes[0].freq_offset = -32;
  g.axes[1].freq_offset = -32;
  Rng rng(11);
  std::vector<Mode> modes;
  for (int i = 0; i < 12; ++i)
    modes.push_back(Mode{{rng.uniform_int(-6, 6), rng.uniform_int(-6, 6)},
                         cplx{rng.normal(), rng.normal()}});
  GridFunction f = GridFunction::from_modes(g, modes);

  SUBCASE("identity leaves the function unchanged") {
    auto t = identity_map(2);
    GridFunction h = apply_affine_freq(f, t, g);
    f.ensure_freq();
    auto a = f.freq();
    auto b = h.freq();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  SUBCASE("lattice translation modulates without changing magnitudes") {
    std::vector<double> v{3.0 / 8.0, -2.0 / 8.0};
    auto t = translation_map(v);
    GridFunction h = apply_affine_freq(f, t, g);
    h.ensure_spatial();
    f.ensure_spatial();
    auto a = f.spatial();
    auto b = h.spatial();
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-10);
  }
  SUBCASE("unimodular maps preserve the coefficient multiset") {
    std::vector<std::int64_t> shear{2};
    auto t = vertical_shear_map(2, shear);
    GridFunction h = apply_affine_freq(f, t, g);
    auto mags = [](const GridFunction& x) {
      std::vector<double> m;
      for (const auto& mode : x.nonzero_modes()) m.push_back(std::abs(mode.coeff));
      std::sort(m.begin(), m.end());
      return m;
    };
    auto ma = mags(f);
    auto mb = mags(h);
    REQUIRE(ma.size() == mb.size());
    for (std::size_t i = 0; i < ma.size(); ++i) CHECK(ma[i] == mb[i]);
  }
  SUBCASE("dyadic dilation obeys the norm identity") {
    std::vector<double> s{2.0, 2.0};
    auto t = dilation_map(s);
    // natural target grid: dilated frequencies live on the lattice of the
    // halved period, and norms are taken over the respective periods
    Grid g2 = g;
    for (auto& ax : g2.axes) ax.period /= 2.0;
    GridFunction h = apply_affine_freq(f, t, g2);
    double p = 4.0;
    double lf = lp_norm(f, AllPeriod{}, p, NormKind::local, nullptr, 2);
    double lh = lp_norm(h, AllPeriod{}, p, NormKind::local, nullptr, 2);
    double det = 4.0;
    double predicted = det * std::pow(det, -1.0 / p) * lf;
    CHECK(lh == doctest::Approx(predicted).epsilon(1e-8));
  }
  SUBCASE("non lattice preserving map rejected") {
    std::vector<double> v{0.1, 0.0};  // not a lattice vector for L = 8
    auto t = translation_map(v);
    CHECK_THROWS_AS(apply_affine_freq(f, t, g), std::domain_error);
  }
}
