#include <cmath>
#include <complex>
#include <filesystem>

#include "doctest.h"

#include "declab/grid.hpp"
#include "declab/norms.hpp"
#include "declab/rng.hpp"

using namespace declab;

namespace {

// independent O(N^2) transform: c_k = (1/N) sum_j F(x_j) e(-x_j xi_k)
std::vector<cplx> naive_forward(const Grid& g, std::span<const cplx> spatial) {
  const double tau = 6.28318530717958647692;
  std::int64_t n = g.total_samples();
  std::vector<cplx> out(n, cplx{});
  std::vector<std::int64_t> kj(g.dims(), 0);
  for (std::int64_t klin = 0; klin < n; ++klin) {
    std::vector<double> xi(g.dims());
    for (int a = 0; a < g.dims(); ++a) xi[a] = g.axes[a].freq(kj[a]);
    std::vector<std::int64_t> jj(g.dims(), 0);
    cplx acc{};
    for (std::int64_t jlin = 0; jlin < n; ++jlin) {
      double phase = 0.0;
      for (int a = 0; a < g.dims(); ++a) phase += g.axes[a].coord(jj[a]) * xi[a];
      acc += spatial[jlin] * std::exp(cplx{0.0, -tau * phase});
      for (int a = g.dims() - 1; a >= 0; --a) {
        if (++jj[a] < g.axes[a].samples) break;
        jj[a] = 0;
      }
    }
    out[klin] = acc / double(n);
    for (int a = g.dims() - 1; a >= 0; --a) {
      if (++kj[a] < g.axes[a].samples) break;
      kj[a] = 0;
    }
  }
  return out;
}

GridFunction random_function(Grid g, std::uint64_t seed) {
  Rng rng(seed);
  auto f = GridFunction::from_spatial(
      std::move(g), [&](std::span<const double>) { return cplx{rng.normal(), rng.normal()}; });
  return f;
}

}  // namespace

TEST_CASE("point mass at the origin transforms to a constant profile") {
  Grid g = make_uniform_grid(2, 8.0, 16);
  GridFunction f = GridFunction::from_spatial(g, [&](std::span<const double> x) {
    return (x[0] == 0.0 && x[1] == 0.0) ? cplx{1.0, 0.0} : cplx{};
  });
  f.ensure_freq();
  auto c = f.freq();
  for (const auto& v : c) CHECK(std::abs(v - c[0]) < 1e-12);
}

TEST_CASE("a single plane wave produces a single coefficient") {
  Grid g = make_uniform_grid(2, 4.0, 16);
  g.axes[0].freq_offset = -8;
  g.axes[1].freq_offset = -8;
  const double tau = 6.28318530717958647692;
  std::vector<std::int64_t> k0{3, -5};
  GridFunction f = GridFunction::from_spatial(g, [&](std::span<const double> x) {
    double ph = (3.0 / 4.0) * x[0] + (-5.0 / 4.0) * x[1];
    return std::exp(cplx{0.0, tau * ph});
  });
  f.ensure_freq();
  CHECK(std::abs(f.coeff_at(k0) - cplx{1.0, 0.0}) < 1e-12);
  double total = f.freq_l2_sq();
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("forward transform matches the direct summation oracle") {
  for (std::uint64_t seed : {7ULL, 8ULL}) {
    Grid g;
    g.axes = {Axis{4.0, 8, -4, -2.0}, Axis{2.0, 16, 3, 0.0}};
    GridFunction f = random_function(g, seed);
    auto keep = std::vector<cplx>(f.spatial().begin(), f.spatial().end());
    f.ensure_freq();
    auto oracle = naive_forward(g, keep);
    auto got = f.freq();
    for (std::size_t i = 0; i < oracle.size(); ++i)
      CHECK(std::abs(oracle[i] - got[i]) <= 1e-10 * (1.0 + std::abs(oracle[i])));
  }
}

TEST_CASE("parseval and round trip across dimensions") {
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      Grid g = make_uniform_grid(n, 2.0, n == 2 ? 16 : 8);
      GridFunction f = random_function(g, 1000 * n + trial);
      std::vector<cplx> original(f.spatial().begin(), f.spatial().end());
      CHECK(f.parseval_gap() <= 1e-10);
      f.ensure_freq();
      f.invalidate_spatial();
      f.ensure_spatial();
      auto back = f.spatial();
      double err = 0.0, ref = 0.0;
      for (std::size_t i = 0; i < original.size(); ++i) {
        err += std::norm(back[i] - original[i]);
        ref += std::norm(original[i]);
      }
      CHECK(std::sqrt(err / ref) <= 1e-12);
    }
  }
}

TEST_CASE("inner product agrees between representations") {
  Grid g = make_uniform_grid(2, 4.0, 16);
  GridFunction f = random_function(g, 5);
  GridFunction h = random_function(g, 6);
  cplx freq_side = inner_product(f, h);
  f.ensure_spatial();
  h.ensure_spatial();
  cplx spatial_side{};
  auto a = f.spatial();
  auto b = h.spatial();
  for (std::size_t i = 0; i < a.size(); ++i) spatial_side += a[i] * std::conj(b[i]);
  spatial_side *= g.cell_volume();
  CHECK(std::abs(freq_side - spatial_side) <= 1e-9 * std::abs(freq_side));
}

TEST_CASE("binary round trip with sidecar") {
  Grid g;
  g.axes = {Axis{8.0, 16, -8, -4.0}, Axis{8.0, 32, 0, -4.0}};
  GridFunction f = random_function(g, 42);
  f.ensure_freq();
  auto path = std::filesystem::temp_directory_path() / "declab_gf_test.bin";
  f.save(path.string());
  GridFunction back = GridFunction::load(path.string());
  CHECK(back.grid().same_layout(g));
  auto a = f.freq();
  auto b = back.freq();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("resampling preserves coefficients and the trig interpolant") {
  Grid g = make_uniform_grid(1, 4.0, 8);
  g.axes[0].freq_offset = -4;
  GridFunction f = random_function(g, 9);
  GridFunction fine = f.resampled(2);
  CHECK(std::abs(f.freq_l2_sq() - fine.freq_l2_sq()) < 1e-14);
  std::vector<double> x{0.3};
  CHECK(std::abs(f.evaluate(x) - fine.evaluate(x)) < 1e-12);
}
