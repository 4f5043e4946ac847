#include <cmath>
#include <filesystem>

#include "doctest.h"

#include "declab/decoupling.hpp"
#include "declab/kakeya.hpp"
#include "declab/norms.hpp"
#include "declab/regions.hpp"
#include "declab/rng.hpp"

using namespace declab;

TEST_CASE("polygon clipping area on known configurations") {
  std::vector<std::array<double, 2>> unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<double, 2>> shifted{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  CHECK(convex_intersection_area(unit, shifted) == doctest::Approx(0.25));
  std::vector<std::array<double, 2>> disjoint{{2, 2}, {3, 2}, {3, 3}, {2, 3}};
  CHECK(convex_intersection_area(unit, disjoint) == doctest::Approx(0.0));
  std::vector<std::array<double, 2>> diamond{{0.5, -0.2}, {1.2, 0.5}, {0.5, 1.2}, {-0.2, 0.5}};
  double a = convex_intersection_area(unit, diamond);
  CHECK(a > 0.5);
  CHECK(a < 1.0);
}

TEST_CASE("transversality certificates from corner enumeration") {
  SUBCASE("identical caps give zero") {
    std::vector<BaseCube> caps{{{0.25, 0.25}, {0.5, 0.5}}, {{0.25, 0.25}, {0.5, 0.5}}};
    auto cert = transversality(caps, 3);
    CHECK(cert.nu == doctest::Approx(0.0));
  }
  SUBCASE("corner caps of the unit square are uniformly transverse") {
    double w = 0.25;
    std::vector<BaseCube> caps{{{0.0, 0.0}, {w, w}},
                               {{1.0 - w, 0.0}, {1.0, w}},
                               {{0.0, 1.0 - w}, {w, 1.0}}};
    auto cert = transversality(caps, 3);
    CHECK(cert.nu > 0.05);
    CHECK(cert.witness_points.size() == 3);
  }
  SUBCASE("separated triple at scale 1/K^2 has wedge of the triangle order") {
    // cells two cells apart: the corner-minimal triangle keeps area ~ w^2
    for (int K : {8, 16}) {
      double w = 1.0 / K;
      std::vector<BaseCube> caps{{{0.0, 0.0}, {w, w}},
                                 {{4 * w, 0.0}, {5 * w, w}},
                                 {{0.0, 4 * w}, {w, 5 * w}}};
      auto cert = transversality(caps, 3);
      CHECK(cert.nu >= 0.5 * w * w);
      CHECK(cert.nu <= 50.0 * w * w);
    }
  }
  SUBCASE("pair of separated intervals on the parabola") {
    std::vector<BaseCube> caps{{{0.0}, {0.25}}, {{0.5}, {1.0}}};
    auto cert = transversality(caps, 2);
    double expect = 2.0 * 0.25 / (std::sqrt(1 + 4 * 0.25 * 0.25) * std::sqrt(1 + 4 * 0.25));
    CHECK(cert.nu == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("exact bilinear functional") {
  SUBCASE("one orthogonal pair through the origin is the unit case") {
    double R = 64.0;
    TubeFamily a, b;
    a.ambient_dim = b.ambient_dim = 2;
    a.scale = b.scale = R;
    a.tubes.push_back(FatTube{{0.0, 0.0}, {1.0, 0.0}, R, 1.0});
    b.tubes.push_back(FatTube{{0.0, 0.0}, {0.0, 1.0}, R, 1.0});
    CHECK(bilinear_kakeya_ratio(a, b, R) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("near-orthogonal pair stays within ten percent") {
    double R = 64.0;
    TubeFamily a, b;
    a.ambient_dim = b.ambient_dim = 2;
    a.scale = b.scale = R;
    a.tubes.push_back(FatTube{{0.0, 0.0}, {1.0, 0.0}, R, 1.0});
    double ang = 1.398;
    b.tubes.push_back(FatTube{{0.0, 0.0}, {std::cos(ang), std::sin(ang)}, R, 1.0});
    double r = bilinear_kakeya_ratio(a, b, R);
    CHECK(std::abs(r - 1.0) <= 0.1);
  }
  SUBCASE("parallel families are rejected") {
    double R = 64.0;
    TubeFamily a, b;
    a.ambient_dim = b.ambient_dim = 2;
    a.scale = b.scale = R;
    a.tubes.push_back(FatTube{{0.0, 0.0}, {1.0, 0.0}, R, 1.0});
    b.tubes.push_back(FatTube{{5.0, 3.0}, {1.0, 0.0}, R, 1.0});
    CHECK_THROWS_AS(bilinear_kakeya_ratio(a, b, R), std::domain_error);
  }
  SUBCASE("rigid motions applied jointly leave the ratio unchanged") {
    Rng rng(15);
    double R = 64.0;
    auto fam1 = random_transverse_family(2, R, 12, 0.0, 0.25, rng);
    auto fam2 = random_transverse_family(2, R, 9, 1.5708, 0.25, rng);
    double base = bilinear_kakeya_ratio(fam1, fam2, R);
    double ang = 0.73, tx = 11.0, ty = -4.0;
    auto move = [&](TubeFamily f) {
      for (auto& t : f.tubes) {
        double cx = t.center[0], cy = t.center[1];
        t.center[0] = std::cos(ang) * cx - std::sin(ang) * cy + tx;
        t.center[1] = std::sin(ang) * cx + std::cos(ang) * cy + ty;
        double dx = t.direction[0], dy = t.direction[1];
        t.direction[0] = std::cos(ang) * dx - std::sin(ang) * dy;
        t.direction[1] = std::sin(ang) * dx + std::cos(ang) * dy;
      }
      return f;
    };
    double moved = bilinear_kakeya_ratio(move(fam1), move(fam2), R);
    CHECK(moved == doctest::Approx(base).epsilon(1e-9));
  }
  SUBCASE("weight doubling cancels exactly") {
    Rng rng(16);
    double R = 64.0;
    auto fam1 = random_transverse_family(2, R, 8, 0.0, 0.2, rng);
    auto fam2 = random_transverse_family(2, R, 8, 1.5708, 0.2, rng);
    double base = bilinear_kakeya_ratio(fam1, fam2, R);
    for (auto& t : fam1.tubes) t.weight *= 2.0;
    for (auto& t : fam2.tubes) t.weight *= 2.0;
    CHECK(bilinear_kakeya_ratio(fam1, fam2, R) == base);
  }
  SUBCASE("a tube missing the other family cannot raise the ratio") {
    Rng rng(17);
    double R = 64.0;
    auto fam1 = random_transverse_family(2, R, 6, 0.0, 0.2, rng);
    auto fam2 = random_transverse_family(2, R, 6, 1.5708, 0.2, rng);
    double base = bilinear_kakeya_ratio(fam1, fam2, R);
    TubeFamily fam1_plus = fam1;
    FatTube far_tube{{1e6, 1e6}, {1.0, 0.0}, R, 1.0};
    fam1_plus.tubes.push_back(far_tube);
    double with_far = bilinear_kakeya_ratio(fam1_plus, fam2, R);
    CHECK(with_far <= base * (1.0 + 1e-12));
  }
  SUBCASE("monte carlo envelope over random transverse families") {
    double worst = 0.0;
    for (double R : {64.0, 256.0}) {
      for (int trial = 0; trial < 100; ++trial) {
        Rng rng(9000 + trial + int(R));
        auto fam1 = random_transverse_family(2, R, 1 + int(rng.uniform_int(0, 49)), 0.0,
                                             0.26, rng);
        auto fam2 = random_transverse_family(2, R, 1 + int(rng.uniform_int(0, 49)),
                                             1.5708, 0.26, rng);
        worst = std::max(worst, bilinear_kakeya_ratio(fam1, fam2, R));
      }
    }
    CHECK(worst <= 10.0);
  }
}

TEST_CASE("grid multilinear functional") {
  SUBCASE("planar case cross-validates the exact evaluator") {
    Rng rng(31);
    double R = 64.0;
    for (int trial = 0; trial < 5; ++trial) {
      Rng tr = rng.fork(trial);
      auto fam1 = random_transverse_family(2, R, 6, 0.0, 0.2, tr);
      auto fam2 = random_transverse_family(2, R, 6, 1.5708, 0.2, tr);
      for (auto& t : fam1.tubes) t.weight = 1.0;
      for (auto& t : fam2.tubes) t.weight = 1.0;
      std::vector<TubeFamily> fams{fam1, fam2};
      double grid_ratio = multilinear_kakeya_ratio(fams, R, 2.0, 0.5, 4);
      double exact_ratio = bilinear_kakeya_ratio(fam1, fam2, R);
      CHECK(grid_ratio == doctest::Approx(exact_ratio).epsilon(0.15));
    }
  }
  SUBCASE("grid refinement moves the planar ratio by less than five percent") {
    Rng rng(37);
    double R = 64.0;
    auto fam1 = random_transverse_family(2, R, 8, 0.0, 0.2, rng);
    auto fam2 = random_transverse_family(2, R, 8, 1.5708, 0.2, rng);
    std::vector<TubeFamily> fams{fam1, fam2};
    double c4 = multilinear_kakeya_ratio(fams, R, 2.0, 0.5, 4);
    double c8 = multilinear_kakeya_ratio(fams, R, 2.0, 0.5, 8);
    CHECK(std::abs(c8 - c4) / c8 < 0.05);
  }
  SUBCASE("single tube per family stays below two") {
    double R = 64.0;
    std::vector<TubeFamily> fams;
    for (int j = 0; j < 3; ++j) {
      TubeFamily f;
      f.ambient_dim = 3;
      f.scale = R;
      FatTube t;
      t.scale = R;
      t.center = {0.0, 0.0, 0.0};
      t.direction = j == 0   ? std::vector<double>{1.0, 0.0, 0.0}
                    : j == 1 ? std::vector<double>{0.0, 1.0, 0.0}
                             : std::vector<double>{0.0, 0.0, 1.0};
      f.tubes.push_back(t);
      fams.push_back(f);
    }
    double r = multilinear_kakeya_ratio(fams, R, 1.5, 0.5, 4);
    CHECK(r <= 2.0);
    CHECK(r > 0.0);
  }
  SUBCASE("endpoint exponent over random transverse triples") {
    double worst = 0.0;
    double R = 64.0;
    for (int trial = 0; trial < 50; ++trial) {
      Rng rng(777 + trial);
      std::vector<TubeFamily> fams;
      for (int j = 0; j < 3; ++j) {
        auto f = random_transverse_family(3, R, 4, j == 1 ? 1.5708 : 0.0, 0.15, rng);
        if (j == 2) {
          for (auto& t : f.tubes) {
            t.direction = {t.direction[2], t.direction[1], std::abs(t.direction[0]) + 0.8};
            double nn = 0.0;
            for (double v : t.direction) nn += v * v;
            nn = std::sqrt(nn);
            for (auto& v : t.direction) v /= nn;
          }
        }
        fams.push_back(f);
      }
      worst = std::max(worst, multilinear_kakeya_ratio(fams, R, 1.5, 0.2, 4));
    }
    CHECK(worst <= 20.0);
  }
  SUBCASE("sub-endpoint exponent rejected") {
    std::vector<TubeFamily> fams(2);
    CHECK_THROWS_AS(multilinear_kakeya_ratio(fams, 64.0, 1.0, 0.5, 4),
                    std::invalid_argument);
  }
}

TEST_CASE("spatial scale doubling functional") {
  const double q = 3.0;
  SUBCASE("flat single packet per side saturates modestly") {
    double delta = 0.25;
    Grid g = paraboloid_grid(delta * delta, 2);
    const double L = g.axes[0].period;
    std::vector<Mode> modes;
    std::int64_t kx1 = std::int64_t(0.125 * L);
    std::int64_t kx2 = std::int64_t(0.75 * L);
    double x1 = double(kx1) / L, x2 = double(kx2) / L;
    modes.push_back(Mode{{kx1, std::int64_t(std::ceil(x1 * x1 * L))}, cplx{1.0, 0.0}});
    modes.push_back(Mode{{kx2, std::int64_t(std::ceil(x2 * x2 * L))}, cplx{1.0, 0.0}});
    GridFunction f = GridFunction::from_modes(g, modes);
    auto rep = ball_inflation_check(f, delta, q, 0.0, 0.25, 0.5, 1.0);
    CHECK(!rep.degenerate);
    CHECK(rep.ratio <= 4.0);
    CHECK(rep.ratio > 0.0);
  }
  SUBCASE("zero input flags degenerate") {
    double delta = 0.25;
    Grid g = paraboloid_grid(delta * delta, 2);
    GridFunction z = GridFunction::zeros(g);
    auto rep = ball_inflation_check(z, delta, q, 0.0, 0.25, 0.5, 1.0);
    CHECK(rep.degenerate);
  }
  SUBCASE("separation precondition enforced") {
    double delta = 0.25;
    Grid g = paraboloid_grid(delta * delta, 2);
    GridFunction z = GridFunction::zeros(g);
    CHECK_THROWS_AS(ball_inflation_check(z, delta, q, 0.0, 0.4, 0.5, 1.0),
                    std::domain_error);
  }
  SUBCASE("random suite stays under the envelope") {
    for (double delta : {0.25, 0.125}) {
      Grid g = paraboloid_grid(delta * delta, 2);
      const double L = g.axes[0].period;
      double worst = 0.0;
      for (int trial = 0; trial < 6; ++trial) {
        Rng rng(500 + trial);
        std::vector<Mode> modes;
        for (double lo : {0.0, 0.5}) {
          double len = lo > 0 ? 0.5 : 0.25;
          for (int m = 0; m < 10; ++m) {
            std::int64_t kx = std::int64_t(std::floor((lo + rng.uniform() * len * 0.99) * L));
            double x = double(kx) / L;
            std::int64_t r0 = std::int64_t(std::ceil(x * x * L - 1e-9));
            std::int64_t r1 =
                std::int64_t(std::ceil((x * x + delta * delta) * L - 1e-9)) - 1;
            modes.push_back(Mode{{kx, rng.uniform_int(r0, std::max(r0, r1))},
                                 cplx{rng.normal(), rng.normal()}});
          }
        }
        GridFunction f = GridFunction::from_modes(g, modes);
        auto rep = ball_inflation_check(f, delta, q, 0.0, 0.25, 0.5, 1.0);
        worst = std::max(worst, rep.ratio);
      }
      CHECK(worst <= 50.0 * std::pow(delta, -0.1));
    }
  }
}

TEST_CASE("tube family csv round trip") {
  Rng rng(2);
  auto fam = random_transverse_family(2, 64.0, 5, 0.3, 0.2, rng);
  auto path = std::filesystem::temp_directory_path() / "declab_tubes.csv";
  fam.export_csv(path.string());
  auto back = TubeFamily::import_csv(path.string());
  REQUIRE(back.tubes.size() == fam.tubes.size());
  for (std::size_t i = 0; i < fam.tubes.size(); ++i) {
    CHECK(back.tubes[i].center[0] == fam.tubes[i].center[0]);
    CHECK(back.tubes[i].direction[1] == fam.tubes[i].direction[1]);
    CHECK(back.tubes[i].scale == fam.tubes[i].scale);
  }
  std::filesystem::remove(path);
}
