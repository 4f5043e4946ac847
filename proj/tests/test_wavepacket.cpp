#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "declab/norms.hpp"
#include "declab/rng.hpp"
#include "declab/wavepacket.hpp"

using namespace declab;

namespace {
BaseFunction smooth_test_function(std::uint64_t seed, int samples = 1 << 11) {
  Rng rng(seed);
  double a = rng.uniform(1.0, 3.0), b = rng.uniform(-4.0, 4.0), c = rng.uniform();
  return BaseFunction::sample(1, samples, 1.0, [&](std::span<const double> xi) {
    double env = std::exp(-a * xi[0] * xi[0]) * (1.0 - xi[0] * xi[0]);
    return cplx{env * std::cos(b * xi[0] + c), env * std::sin(0.5 * b * xi[0])};
  });
}
}  // namespace

TEST_CASE("extension operator basics") {
  auto f = smooth_test_function(1, 1 << 9);
  SUBCASE("zero input gives zero field") {
    BaseFunction z = f;
    for (auto& v : z.values) v = cplx{};
    std::vector<double> x{0.3, -2.0};
    CHECK(std::abs(extension_point(z, x)) == 0.0);
  }
  SUBCASE("linearity to rounding") {
    auto g = smooth_test_function(2, 1 << 9);
    BaseFunction sum = f;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
    std::vector<double> x{1.1, 5.0};
    cplx lhs = extension_point(sum, x);
    cplx rhs = extension_point(f, x) + extension_point(g, x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
  SUBCASE("single narrow bump behaves like a modulated plateau near the origin") {
    // f concentrated near xi_0: |Ef| near 0 is close to |\int f|, and the
    // leading oscillation is e(x.(xi_0, xi_0^2))
    double xi0 = 0.25;
    auto bump = BaseFunction::sample(1, 1 << 9, 1.0, [&](std::span<const double> xi) {
      double u = (xi[0] - xi0) / 0.02;
      return cplx{std::exp(-u * u), 0.0};
    });
    std::vector<double> zero{0.0, 0.0};
    double at0 = std::abs(extension_point(bump, zero));
    std::vector<double> near{0.5, 0.25};
    double atnear = std::abs(extension_point(bump, near));
    CHECK(at0 > 0.0);
    CHECK(atnear == doctest::Approx(at0).epsilon(0.05));  // modulus nearly constant
    // phase advances like the plane wave over a small step
    cplx v0 = extension_point(bump, zero);
    cplx v1 = extension_point(bump, near);
    double predicted = xi0 * near[0] + xi0 * xi0 * near[1];
    cplx expected = v0 * std::polar(1.0, 2.0 * M_PI * predicted);
    CHECK(std::abs(v1 - expected) <= 0.05 * std::abs(v0));
  }
}

TEST_CASE("extension decomposition: energy, reconstruction, per-window identity") {
  for (double R : {64.0, 256.0}) {
    for (std::uint64_t seed : {10ULL, 11ULL}) {
      auto f = smooth_test_function(seed);
      auto dec = wp_decompose_extension(f, R);
      CHECK(std::abs(dec.energy_ratio - 1.0) <= 1e-6);
      CHECK(dec.reconstruction_rel_l2 <= 1e-6);
      CHECK(dec.per_omega_worst_gap <= 1e-6);
      CHECK(dec.set.packets.size() > 0);
    }
  }
}

TEST_CASE("zero input decomposes to all-zero coefficients") {
  auto f = smooth_test_function(3, 1 << 9);
  for (auto& v : f.values) v = cplx{};
  auto dec = wp_decompose_extension(f, 64.0);
  for (const auto& p : dec.set.packets) CHECK(std::abs(p.coeff) == 0.0);
}

TEST_CASE("matched packet input concentrates its coefficients") {
  // f = the frequency profile of one packet: the matching (q, omega)
  // coefficient dominates and the same-omega neighbors decay in |q - q0|
  const double R = 256.0;
  const double rsq = std::sqrt(R);
  SmoothBump psi = build_bump();
  double c_om = 8.0 / rsq;
  double c_q = 0.0;
  auto f = BaseFunction::sample(1, 1 << 12, 1.0, [&](std::span<const double> xi) {
    double g = psi(rsq * (xi[0] - c_om));
    double ph = -c_q * (xi[0] - c_om);
    return std::pow(R, 0.25) * g * std::polar(1.0, 2.0 * M_PI * ph) /
           std::sqrt(std::sqrt(2.0));
  });
  auto dec = wp_decompose_extension(f, R);
  double best = 0.0, second = 0.0;
  for (const auto& p : dec.set.packets) {
    double m = std::abs(p.coeff);
    if (m > best) {
      second = best;
      best = m;
    } else if (m > second) {
      second = m;
    }
  }
  CHECK(best > 1.5 * second);
  // geometric-type decay across q at the matched omega
  std::vector<std::pair<double, double>> at_omega;  // (|c_q|, |a|)
  for (const auto& p : dec.set.packets)
    if (std::abs(p.tube.freq_center[0] - c_om) < 1e-12)
      at_omega.emplace_back(std::abs(p.tube.center_base[0]), std::abs(p.coeff));
  // shell maxima decay monotonically away from the matched tube
  double shell1 = 0.0, shell2 = 0.0, shell3 = 0.0, near = 0.0;
  for (auto& [d, m] : at_omega) {
    if (d <= rsq) near = std::max(near, m);
    if (d > 2.0 * rsq && d <= 4.0 * rsq) shell1 = std::max(shell1, m);
    if (d > 4.0 * rsq && d <= 8.0 * rsq) shell2 = std::max(shell2, m);
    if (d > 8.0 * rsq) shell3 = std::max(shell3, m);
  }
  CHECK(near > shell1);
  CHECK(shell1 > shell2);
  CHECK(shell2 > shell3);
  CHECK(near > 100.0 * shell3);
}

TEST_CASE("packet profiles: plateau height, global bound, decay outside") {
  for (double R : {64.0, 256.0, 1024.0}) {
    Tube t;
    t.center_base = {0.0};
    t.freq_center = {0.25};
    t.scale = R;
    auto rep = packet_profile_check(t, 1.0, 4);
    // global sup against R^{-1/4}
    CHECK(rep.fitted_c <= 5.0);
    CHECK(rep.fitted_c > 0.05);
    if (R == 256.0) {
      // the cap's angular spread keeps |phi| near R^{-1/4} out to a few
      // widths; concentration sets in from the dilated tube onward
      CHECK(rep.sup_global / rep.sup_outside_midslab >= 3.0);
      auto rep3 = packet_profile_check(t, 3.0, 4);
      CHECK(rep3.sup_global / rep3.sup_outside_midslab >= 10.0);
    }
    // non-stationary-phase plateau at the center: at least half of
    // R^{-1/4} |int gamma| (gamma mass is about 0.92, tight frame halves it)
    double gamma_mass = 0.0;
    {
      SmoothBump psi = build_bump();
      for (int i = 0; i < 4096; ++i) {
        double x = -1.0 + (i + 0.5) / 2048.0;
        gamma_mass += psi(x) / 2048.0;
      }
    }
    CHECK(rep.center_modulus >=
          0.5 * std::pow(R, -0.25) * gamma_mass / std::sqrt(2.0));
  }
}

TEST_CASE("dilated-tube decay exponent") {
  const double R = 256.0;
  Tube t;
  t.center_base = {0.0};
  t.freq_center = {0.25};
  t.scale = R;
  double prev = 1e300;
  for (double m : {2.0, 4.0, 8.0}) {
    auto rep = packet_profile_check(t, m, 4, 64);
    CHECK(rep.sup_outside < prev);
    prev = rep.sup_outside;
    CHECK(rep.fitted_c_outside <= 50.0);  // C_N for N = 4
  }
}

TEST_CASE("tube membership matches the defining inequalities") {
  Tube t;
  t.center_base = {3.0};
  t.freq_center = {0.5};
  t.scale = 64.0;
  t.dilation = 2.0;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    double xn = rng.uniform(-80.0, 80.0);
    double x0 = rng.uniform(-60.0, 60.0);
    std::vector<double> x{x0, xn};
    bool in = std::abs((x0 - 3.0) + 2.0 * 0.5 * xn) <= 2.0 * 8.0 && std::abs(xn) <= 64.0;
    CHECK(t.contains(x) == in);
  }
}

TEST_CASE("dual-box decomposition is an exact orthonormal expansion") {
  Rng rng(21);
  for (int n : {1, 2, 3}) {
    Grid g = make_uniform_grid(n, 32.0, n == 3 ? 64 : 128);
    for (auto& ax : g.axes) ax.freq_offset = -ax.samples / 2;
    std::vector<Mode> modes;
    for (int m = 0; m < 50; ++m) {
      std::vector<std::int64_t> k(n);
      for (int a = 0; a < n; ++a) k[a] = rng.uniform_int(-8, 8);
      modes.push_back(Mode{k, cplx{rng.normal(), rng.normal()}});
    }
    GridFunction f = GridFunction::from_modes(g, modes);
    FreqBox box;
    box.lo.assign(n, -0.3);
    box.hi.assign(n, 0.3);
    auto dec = wp_decompose_box(f, box);
    CHECK(dec.reconstruction_rel_l2 <= 1e-8);
    CHECK(dec.l2_ratio >= 1.0 - 1e-9);
    CHECK(dec.l2_ratio <= std::pow(2.0, n) + 1e-9);
  }
}

TEST_CASE("single packet input returns a lone unit coefficient") {
  Grid g = make_uniform_grid(2, 32.0, 128);
  for (auto& ax : g.axes) ax.freq_offset = -64;
  FreqBox box;
  box.lo = {-0.25, -0.25};
  box.hi = {0.25, 0.25};
  // build W_{T0} by decomposing a seed function, then re-decompose it
  Rng rng(9);
  std::vector<Mode> modes;
  for (int m = 0; m < 5; ++m)
    modes.push_back(
        Mode{{rng.uniform_int(-6, 6), rng.uniform_int(-6, 6)}, cplx{rng.normal(), 0.0}});
  GridFunction seed = GridFunction::from_modes(g, modes);
  auto dec0 = wp_decompose_box(seed, box);
  std::size_t idx = dec0.set.packets.size() / 3;
  GridFunction wt = box_packet(g, dec0, idx);
  auto dec = wp_decompose_box(wt, box);
  double self = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < dec.set.packets.size(); ++i) {
    double m = std::abs(dec.set.packets[i].coeff);
    if (i == idx)
      self = m;
    else
      cross = std::max(cross, m);
  }
  CHECK(self == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cross <= 1e-9);
  CHECK(dec.reconstruction_rel_l2 <= 1e-8);
}

TEST_CASE("zero function yields an empty dual-box expansion") {
  Grid g = make_uniform_grid(2, 16.0, 64);
  for (auto& ax : g.axes) ax.freq_offset = -32;
  GridFunction z = GridFunction::zeros(g);
  FreqBox box;
  box.lo = {-0.25, -0.25};
  box.hi = {0.25, 0.25};
  auto dec = wp_decompose_box(z, box);
  for (const auto& p : dec.set.packets) CHECK(std::abs(p.coeff) == 0.0);
}

TEST_CASE("constant-magnitude packet sums have comparable p-norms") {
  // || sum w_T W_T ||_p ~ lambda |T'|^{1/p} over random sign patterns
  Grid g = make_uniform_grid(2, 16.0, 64);
  for (auto& ax : g.axes) ax.freq_offset = -32;
  Rng rng(33);
  std::vector<Mode> modes;
  for (int m = 0; m < 30; ++m)
    modes.push_back(
        Mode{{rng.uniform_int(-5, 5), rng.uniform_int(-5, 5)}, cplx{rng.normal(), rng.normal()}});
  GridFunction f = GridFunction::from_modes(g, modes);
  FreqBox box;
  box.lo = {-0.4, -0.4};
  box.hi = {0.4, 0.4};
  auto dec = wp_decompose_box(f, box);

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng tr = rng.fork(trial);
    auto mod = dec;
    int kept = 0;
    for (auto& p : mod.set.packets) {
      if (tr.uniform() < 0.2) {
        p.coeff = std::polar(1.0, 2.0 * M_PI * tr.uniform());
        ++kept;
      } else {
        p.coeff = cplx{};
      }
    }
    if (kept == 0) continue;
    GridFunction sum = box_rebuild(g, mod);
    double tile_vol = 1.0;
    for (double s : dec.set.tile_step) tile_vol *= s;
    for (double p : {1.0, 2.0, 4.0, 6.0}) {
      double nrm = lp_norm(sum, AllPeriod{}, p, NormKind::local);
      double predicted = std::pow(double(kept) * tile_vol, 1.0 / p);
      double c = nrm / predicted;
      worst = std::max(worst, std::max(c, 1.0 / c));
    }
  }
  CHECK(worst <= 20.0);
}

TEST_CASE("level-set slices are p-norm bounded by the input") {
  Grid g = make_uniform_grid(2, 16.0, 64);
  for (auto& ax : g.axes) ax.freq_offset = -32;
  Rng rng(44);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    Rng tr = rng.fork(trial);
    std::vector<Mode> modes;
    for (int m = 0; m < 25; ++m)
      modes.push_back(Mode{{tr.uniform_int(-5, 5), tr.uniform_int(-5, 5)},
                           cplx{tr.normal(), tr.normal()}});
    GridFunction f = GridFunction::from_modes(g, modes);
    FreqBox box;
    box.lo = {-0.4, -0.4};
    box.hi = {0.4, 0.4};
    auto dec = wp_decompose_box(f, box);
    double top = 0.0;
    for (const auto& p : dec.set.packets) top = std::max(top, std::abs(p.coeff));
    for (double lambda : {top / 2.0, top / 8.0, top / 64.0}) {
      GridFunction slice = box_level_slice(f, dec, lambda);
      for (double p : {2.0, 4.0}) {
        double num = lp_norm(slice, AllPeriod{}, p, NormKind::local);
        double den = lp_norm(f, AllPeriod{}, p, NormKind::local);
        if (den > 0) worst = std::max(worst, num / den);
      }
    }
  }
  CHECK(worst <= 50.0);
}

TEST_CASE("packet set export writes one record per tube") {
  auto f = smooth_test_function(5, 1 << 9);
  auto dec = wp_decompose_extension(f, 64.0, 2.0);
  auto path = std::filesystem::temp_directory_path() / "declab_wps.jsonl";
  dec.set.export_jsonl(path.string());
  std::ifstream is(path);
  std::string line;
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (!line.empty()) {
      ++count;
      CHECK(line.find("omega_center") != std::string::npos);
      CHECK(line.find("scale") != std::string::npos);
    }
  }
  CHECK(count == dec.set.packets.size());
  std::filesystem::remove(path);
}
