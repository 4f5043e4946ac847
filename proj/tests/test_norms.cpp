#include <cmath>

#include "doctest.h"

#include "declab/grid.hpp"
#include "declab/norms.hpp"
#include "declab/rng.hpp"

using namespace declab;

TEST_CASE("constant function has every average equal to its modulus") {
  Grid g = make_uniform_grid(2, 8.0, 32);
  GridFunction f = GridFunction::from_spatial(
      g, [](std::span<const double>) { return cplx{3.0, 4.0}; });  // |F| = 5
  SpatialBox q = cube_at_origin(2, 4.0);
  for (double p : {1.0, 2.0, 4.0, 6.0}) {
    CHECK(lp_norm(f, q, p, NormKind::local_avg) == doctest::Approx(5.0).epsilon(1e-12));
  }
  CHECK(lp_norm(f, q, std::numeric_limits<double>::infinity(), NormKind::local) ==
        doctest::Approx(5.0));
}

TEST_CASE("averages are monotone in p") {
  Grid g = make_uniform_grid(2, 8.0, 32);
  Rng rng(17);
  GridFunction f = GridFunction::from_spatial(
      g, [&](std::span<const double>) { return cplx{rng.normal(), rng.normal()}; });
  SpatialBox q = cube_at_origin(2, 6.0);
  double prev = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    double v = lp_norm(f, q, p, NormKind::local_avg);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("weight normalization and monotonicity") {
  Grid g = make_uniform_grid(2, 64.0, 16);
  std::vector<double> c{0.0, 0.0};
  WeightSpec w = WeightSpec::for_cube(c, 8.0, 2);
  CHECK(w.exponent == 200.0);
  std::vector<double> x0{0.0, 0.0};
  CHECK(w.value(g, x0) == 1.0);
  double prev = 1.0;
  for (double r : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    std::vector<double> x{r, 0.0};
    double v = w.value(g, x);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("weighted norm dominates the local norm up to the window constant") {
  Grid g = make_uniform_grid(2, 32.0, 64);
  Rng rng(4);
  GridFunction f = GridFunction::from_spatial(
      g, [&](std::span<const double>) { return cplx{rng.normal(), 0.0}; });
  SpatialBox q = cube_at_origin(2, 8.0);
  WeightSpec w = WeightSpec::for_cube(q.center, 8.0, 2);
  for (double p : {2.0, 4.0}) {
    double loc = lp_norm(f, q, p, NormKind::local);
    double wei = lp_norm(f, q, p, NormKind::weighted, &w);
    // the weight is identically 1 on the window
    CHECK(wei >= loc * (1.0 - 1e-12));
    CHECK(wei >= std::pow(2.0, -200.0 / p) * loc);
  }
}

TEST_CASE("mode-set norms agree with the direct grid quadrature") {
  Grid g = make_uniform_grid(2, 16.0, 64);
  Rng rng(12);
  std::vector<Mode> modes;
  for (int i = 0; i < 9; ++i)
    modes.push_back(
        Mode{{rng.uniform_int(4, 20), rng.uniform_int(4, 20)}, cplx{rng.normal(), rng.normal()}});
  GridFunction f = GridFunction::from_modes(g, modes);
  for (double p : {2.0, 4.0, 6.0}) {
    double direct = lp_norm(f, AllPeriod{}, p, NormKind::local, nullptr, 2);
    double via_modes = lp_norm_modes(g, modes, p, 8);
    CHECK(via_modes == doctest::Approx(direct).epsilon(p == 2.0 ? 1e-12 : 2e-3));
  }
  // p = 2 is an exact identity in both paths
  double l2 = lp_norm_modes(g, modes, 2.0, 1);
  double exact = 0.0;
  for (const auto& m : modes) exact += std::norm(m.coeff);
  exact = std::sqrt(exact * g.box_volume());
  CHECK(l2 == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("weight chain inequalities under subdivision") {
  std::vector<double> c{0.0, 0.0};
  SUBCASE("trivial subdivision has chain constant one") {
    auto rep = check_weight_inequalities(2, c, 4.0, 1, 24);
    CHECK(rep.chain_upper == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ball_upper == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("4x4 subdivision constants stay modest and coverage is positive") {
    auto rep = check_weight_inequalities(2, c, 4.0, 4, 32);
    CHECK(rep.chain_upper <= 100.0);
    CHECK(rep.ball_upper <= 100.0);
    CHECK(rep.cover_min > 0.0);
    CHECK(rep.overlap_sup <= 100.0);
    CHECK(std::isfinite(rep.chain_upper));
  }
}

TEST_CASE("frequency-localized functions satisfy the reversed average inequality") {
  // support of diameter ~1/R against a cube of side R
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    double R = 16.0;
    Grid g = make_uniform_grid(2, 4.0 * R, 256);
    std::vector<Mode> modes;
    for (int i = 0; i < 5; ++i) {
      // modes within a box of diameter 1/R = 4 lattice steps
      modes.push_back(Mode{{32 + rng.uniform_int(0, 4), 40 + rng.uniform_int(0, 4)},
                           cplx{rng.normal(), rng.normal()}});
    }
    GridFunction f = GridFunction::from_modes(g, modes);
    std::vector<double> center{0.0, 0.0};
    for (double q : {4.0, 6.0}) {
      for (double p : {2.0, 4.0}) {
        if (q < p) continue;
        worst = std::max(worst, reverse_holder_constant(f, center, R, q, p));
      }
    }
  }
  CHECK(worst <= 100.0);
  CHECK(worst > 0.0);
}

TEST_CASE("gated norms report the refinement change") {
  Grid g = make_uniform_grid(2, 8.0, 32);
  Rng rng(5);
  std::vector<Mode> modes;
  for (int i = 0; i < 6; ++i)
    modes.push_back(Mode{{rng.uniform_int(0, 10), rng.uniform_int(0, 10)},
                         cplx{rng.normal(), rng.normal()}});
  GridFunction f = GridFunction::from_modes(g, modes);
  auto gated = lp_norm_gated(f, AllPeriod{}, 2.0, NormKind::local);
  CHECK(gated.accepted);
  CHECK(gated.rel_change <= 1e-12);
}
