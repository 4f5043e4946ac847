#include "declab/wavepacket.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace declab {

namespace {
constexpr double kTau = 6.28318530717958647692;

cplx unit_phase(double t) {
  double r = t - std::floor(t);
  return {std::cos(kTau * r), std::sin(kTau * r)};
}
}  // namespace

std::int64_t BaseFunction::total() const {
  std::int64_t t = 1;
  for (int a = 0; a < dims; ++a) t *= samples_per_axis;
  return t;
}

std::vector<double> BaseFunction::point(std::int64_t lin) const {
  std::vector<double> x(dims);
  for (int a = dims - 1; a >= 0; --a) {
    std::int64_t i = lin % samples_per_axis;
    lin /= samples_per_axis;
    x[a] = -support + (double(i) + 0.5) * spacing();
  }
  return x;
}

double BaseFunction::l2_norm() const {
  double cell = std::pow(spacing(), dims);
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * cell);
}

cplx extension_point(const BaseFunction& f, std::span<const double> x) {
  const int d = f.dims;
  const double cell = std::pow(f.spacing(), d);
  cplx acc{};
  for (std::int64_t i = 0; i < f.total(); ++i) {
    if (f.values[i] == cplx{}) continue;
    auto xi = f.point(i);
    double phase = 0.0, r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      phase += x[a] * xi[a];
      r2 += xi[a] * xi[a];
    }
    phase += x[d] * r2;
    acc += f.values[i] * unit_phase(phase);
  }
  return acc * cell;
}

GridFunction extension_operator(const BaseFunction& f, Grid eval_grid) {
  if (eval_grid.dims() != f.dims + 1)
    throw std::invalid_argument("evaluation grid must have one more dimension than f");
  return GridFunction::from_spatial(
      std::move(eval_grid), [&](std::span<const double> x) { return extension_point(f, x); });
}

double WavePacketSet::coeff_l2_sq() const {
  double s = 0.0;
  for (const auto& p : packets) s += std::norm(p.coeff);
  return s;
}

void WavePacketSet::export_jsonl(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  char buf[512];
  for (const auto& p : packets) {
    std::string om = "[", q = "[";
    for (std::size_t a = 0; a < p.tube.freq_center.size(); ++a) {
      std::snprintf(buf, sizeof buf, "%s%.17g", a ? "," : "", p.tube.freq_center[a]);
      om += buf;
    }
    for (std::size_t a = 0; a < p.tube.center_base.size(); ++a) {
      std::snprintf(buf, sizeof buf, "%s%.17g", a ? "," : "", p.tube.center_base[a]);
      q += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "{\"omega_center\":%s],\"q_center\":%s],\"coeff_re\":%.17g,"
                  "\"coeff_im\":%.17g,\"scale\":%.17g}\n",
                  om.c_str(), q.c_str(), p.coeff.real(), p.coeff.imag(), scale);
    os << buf;
  }
}

ExtensionDecomposition wp_decompose_extension(const BaseFunction& f, double R,
                                              double q_range_factor) {
  const int d = f.dims;
  const double rsq = std::sqrt(R);
  const double gamma_rad = 2.0 / 3.0 / rsq;  // support radius of gamma(R^{1/2} .)
  SmoothBump psi = build_bump();
  const double cell = std::pow(f.spacing(), d);
  const double packet_norm = std::pow(2.0, -0.5 * d);  // tight-frame factor

  ExtensionDecomposition out;
  out.set.formulation = PacketFormulation::extension;
  out.set.scale = R;
  out.set.ambient_dims = d + 1;

  double f_l2_sq = 0.0;
  for (const auto& v : f.values) f_l2_sq += std::norm(v) * cell;
  out.f_l2_sq = f_l2_sq;

  // omega lattice: c_omega = l / R^{1/2}
  const std::int64_t lmax = std::int64_t(std::ceil((f.support + gamma_rad) * rsq));
  // the q sum is a Fourier series sampled on f's mesh: indices are only
  // distinguishable below half the mesh alias period M / sqrt(R)
  const std::int64_t alias_half =
      std::int64_t(std::floor(double(f.samples_per_axis) / (2.0 * rsq))) - 1;
  const std::int64_t mspan =
      std::min(std::int64_t(std::ceil(2.0 * q_range_factor * rsq)), alias_half);
  if (mspan < 8)
    throw std::domain_error("mesh resolution insufficient for this packet scale");

  // enumerate omega multi-indices
  std::vector<std::vector<std::int64_t>> omegas;
  {
    std::vector<std::int64_t> l(d, -lmax);
    while (true) {
      omegas.push_back(l);
      int a = d - 1;
      while (a >= 0 && ++l[a] > lmax) l[a--] = -lmax;
      if (a < 0) break;
    }
  }

  double energy = 0.0, worst_gap = 0.0;
  std::vector<cplx> recon(f.total(), cplx{});

  std::vector<std::int64_t> mesh_hits;
  std::vector<double> gvals;
  for (const auto& l : omegas) {
    std::vector<double> c_om(d);
    for (int a = 0; a < d; ++a) c_om[a] = double(l[a]) / rsq;

    // mesh points under gamma(R^{1/2}(xi - c_omega))
    mesh_hits.clear();
    gvals.clear();
    double f_om_l2 = 0.0;
    for (std::int64_t i = 0; i < f.total(); ++i) {
      auto xi = f.point(i);
      double g = 1.0;
      for (int a = 0; a < d && g != 0.0; ++a) g *= psi(rsq * (xi[a] - c_om[a]));
      if (g != 0.0) {
        mesh_hits.push_back(i);
        gvals.push_back(g);
        f_om_l2 += std::norm(f.values[i] * g) * cell;
      }
    }
    if (mesh_hits.empty()) continue;

    double omega_energy = 0.0;
    std::vector<std::int64_t> m(d, -mspan);
    std::vector<cplx> aq;
    std::vector<std::vector<std::int64_t>> qs;
    while (true) {
      std::vector<double> c_q(d);
      for (int a = 0; a < d; ++a) c_q[a] = 0.5 * rsq * double(m[a]);
      cplx s{};
      for (std::size_t u = 0; u < mesh_hits.size(); ++u) {
        auto xi = f.point(mesh_hits[u]);
        double ph = 0.0;
        for (int a = 0; a < d; ++a) ph += c_q[a] * (xi[a] - c_om[a]);
        s += f.values[mesh_hits[u]] * gvals[u] * unit_phase(ph);
      }
      cplx a_T = packet_norm * std::pow(R, 0.25 * d) * s * cell;
      omega_energy += std::norm(a_T);
      aq.push_back(a_T);
      qs.push_back(m);

      WavePacket p;
      p.tube.center_base = c_q;
      p.tube.freq_center = c_om;
      p.tube.scale = R;
      p.tube.dilation = 1.0;
      p.coeff = a_T;
      out.set.packets.push_back(std::move(p));

      int a = d - 1;
      while (a >= 0 && ++m[a] > mspan) m[a--] = -mspan;
      if (a < 0) break;
    }
    energy += omega_energy;
    if (f_om_l2 > 1e-14 * f_l2_sq)
      worst_gap = std::max(worst_gap, std::abs(omega_energy - f_om_l2) / f_om_l2);

    // accumulate this omega's contribution to the reconstruction
    for (std::size_t u = 0; u < mesh_hits.size(); ++u) {
      auto xi = f.point(mesh_hits[u]);
      cplx s{};
      for (std::size_t qi = 0; qi < aq.size(); ++qi) {
        double ph = 0.0;
        for (int a = 0; a < d; ++a)
          ph -= 0.5 * rsq * double(qs[qi][a]) * (xi[a] - c_om[a]);
        s += aq[qi] * unit_phase(ph);
      }
      recon[mesh_hits[u]] += packet_norm * std::pow(R, 0.25 * d) * gvals[u] * s;
    }
  }

  out.energy_ratio = f_l2_sq > 0 ? energy / f_l2_sq : 1.0;
  out.per_omega_worst_gap = worst_gap;
  double err = 0.0;
  for (std::int64_t i = 0; i < f.total(); ++i) err += std::norm(recon[i] - f.values[i]) * cell;
  out.reconstruction_rel_l2 = f_l2_sq > 0 ? std::sqrt(err / f_l2_sq) : 0.0;
  return out;
}

cplx packet_profile(const Tube& t, std::span<const double> x, int eta_samples) {
  const int d = int(t.center_base.size());
  SmoothBump psi = build_bump();
  const double R = t.scale;
  const double rsq = std::sqrt(R);
  const double h = (4.0 / 3.0) / eta_samples;  // eta in [-2/3, 2/3]
  double xn = x[d];

  // E gamma_T(x) = R^{-d/4} e(x_bar.c_om + x_n |c_om|^2) int gamma(eta) e(phi(eta)) d eta
  std::vector<double> lin(d);
  for (int a = 0; a < d; ++a)
    lin[a] = ((x[a] - t.center_base[a]) + 2.0 * t.freq_center[a] * xn) / rsq;

  cplx integral{};
  std::vector<int> idx(d, 0);
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= eta_samples;
  for (std::int64_t u = 0; u < total; ++u) {
    double g = 1.0, ph = 0.0, r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      double eta = -2.0 / 3.0 + (idx[a] + 0.5) * h;
      g *= psi(eta);
      ph += eta * lin[a];
      r2 += eta * eta;
    }
    if (g != 0.0) integral += g * unit_phase(ph + r2 * xn / R);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < eta_samples) break;
      idx[a] = 0;
    }
  }
  integral *= std::pow(h, d);

  double c2 = 0.0, ph0 = 0.0;
  for (int a = 0; a < d; ++a) {
    c2 += t.freq_center[a] * t.freq_center[a];
    ph0 += x[a] * t.freq_center[a];
  }
  ph0 += xn * c2;
  return std::pow(2.0, -0.5 * d) * std::pow(R, -0.25 * d) * unit_phase(ph0) * integral;
}

PacketProfileReport packet_profile_check(const Tube& t, double dilation_m, int n_decay,
                                         int samples_per_axis) {
  const int d = int(t.center_base.size());
  if (d != 1) throw std::invalid_argument("profile check implemented for ambient dimension 2");
  const double R = t.scale;
  const double rsq = std::sqrt(R);

  PacketProfileReport rep;
  const double uspan = (3.0 * dilation_m + 6.0) * rsq;
  std::vector<double> x(2);
  for (int i = 0; i < samples_per_axis; ++i) {
    double xn = -R + (i + 0.5) * (2.0 * R / samples_per_axis);
    for (int j = 0; j < samples_per_axis; ++j) {
      double u = -uspan + (j + 0.5) * (2.0 * uspan / samples_per_axis);
      x[0] = t.center_base[0] - 2.0 * t.freq_center[0] * xn + u;
      x[1] = xn;
      double v = std::abs(packet_profile(t, x));
      rep.sup_global = std::max(rep.sup_global, v);
      if (std::abs(u) > dilation_m * rsq) {
        rep.sup_outside = std::max(rep.sup_outside, v);
        if (std::abs(xn) <= R / 4.0)
          rep.sup_outside_midslab = std::max(rep.sup_outside_midslab, v);
      }
    }
  }
  double base = std::pow(R, -0.25 * d);
  rep.fitted_c = rep.sup_global / base;
  rep.fitted_c_outside = rep.sup_outside / (base * std::pow(dilation_m, -double(n_decay)));
  std::vector<double> center = t.center_base;
  center.push_back(0.0);
  rep.center_modulus = std::abs(packet_profile(t, center));
  return rep;
}

namespace {

struct BoxLattice {
  std::vector<std::int64_t> klo, width;  // padded, width even
  std::vector<std::int64_t> tiles;       // (3/2) width per axis
  std::vector<double> eta_center;        // c_B * L per axis, in lattice units
  std::vector<double> window;            // W' = (3/2) width, lattice units
};

double eta_value(const SmoothBump& psi, const BoxLattice& bl, std::span<const std::int64_t> k) {
  double v = 1.0;
  for (std::size_t a = 0; a < bl.klo.size() && v != 0.0; ++a)
    v *= psi((double(k[a]) - bl.eta_center[a]) / bl.window[a]);
  return v;
}

BoxLattice snap_box(const GridFunction& f, const FreqBox& box) {
  const Grid& g = f.grid();
  const int n = g.dims();
  BoxLattice bl;
  bl.klo.resize(n);
  bl.width.resize(n);
  bl.tiles.resize(n);
  bl.eta_center.resize(n);
  bl.window.resize(n);
  for (int a = 0; a < n; ++a) {
    double L = g.axes[a].period;
    std::int64_t klo = std::int64_t(std::ceil(box.lo[a] * L - 1e-9));
    std::int64_t khi = std::int64_t(std::ceil(box.hi[a] * L - 1e-9));  // exclusive
    std::int64_t w = khi - klo;
    if (w <= 0) throw std::invalid_argument("degenerate box");
    if (w % 2 != 0) {
      ++khi;
      ++w;
    }
    bl.klo[a] = klo;
    bl.width[a] = w;
    bl.tiles[a] = (3 * w) / 2;
    bl.eta_center[a] = 0.5 * double(klo + khi);
    bl.window[a] = 1.5 * double(w);
    // supp eta = [center - w, center + w] must stay in band
    std::int64_t off = g.axes[a].freq_offset, N = g.axes[a].samples;
    if (klo - w / 2 < off || khi + w / 2 > off + N)
      throw std::domain_error("box too close to the band edge for the tiling window");
  }
  return bl;
}

}  // namespace

BoxDecomposition wp_decompose_box(const GridFunction& f, const FreqBox& box) {
  const Grid& g = f.grid();
  const int n = g.dims();
  SmoothBump psi = build_bump();

  BoxLattice bl = snap_box(f, box);

  // support must sit inside the tiling window (the doubled box); the
  // expansion is exact for support inside the box itself, and single-packet
  // inputs supported on the doubled box re-expand exactly by orthonormality
  for (const auto& m : f.nonzero_modes()) {
    for (int a = 0; a < n; ++a) {
      std::int64_t lo = bl.klo[a] - bl.width[a] / 2;
      std::int64_t hi = bl.klo[a] + bl.width[a] + bl.width[a] / 2;
      if (m.k[a] < lo || m.k[a] >= hi)
        throw std::domain_error("function has frequency support outside the box");
    }
  }

  // modes of f and eta values over supp(eta)
  std::vector<std::int64_t> klo_ext(n), kcount(n);
  for (int a = 0; a < n; ++a) {
    klo_ext[a] = bl.klo[a] - bl.width[a] / 2;
    kcount[a] = 2 * bl.width[a];
  }
  const_cast<GridFunction&>(f).ensure_freq();

  std::vector<std::vector<std::int64_t>> ks;
  std::vector<double> etas;
  std::vector<cplx> cf;
  double eta_sq_sum = 0.0;
  {
    std::vector<std::int64_t> k(n);
    std::vector<std::int64_t> idx(n, 0);
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) total *= kcount[a];
    for (std::int64_t u = 0; u < total; ++u) {
      for (int a = 0; a < n; ++a) k[a] = klo_ext[a] + idx[a];
      double e = eta_value(psi, bl, k);
      if (e != 0.0) {
        eta_sq_sum += e * e;
        cplx c = f.in_band(k) ? f.coeff_at(k) : cplx{};
        if (e > 1e-15 || c != cplx{}) {
          ks.push_back(k);
          etas.push_back(e);
          cf.push_back(c);
        }
      }
      for (int a = n - 1; a >= 0; --a) {
        if (++idx[a] < kcount[a]) break;
        idx[a] = 0;
      }
    }
  }

  const double vol = g.box_volume();
  const double rho = 1.0 / std::sqrt(vol * eta_sq_sum);

  BoxDecomposition out;
  out.set.formulation = PacketFormulation::dual_box;
  out.set.ambient_dims = n;
  out.set.scale = 0.0;
  for (int a = 0; a < n; ++a)
    out.set.scale = std::max(out.set.scale, g.axes[a].period / bl.window[a]);
  out.set.box.lo.resize(n);
  out.set.box.hi.resize(n);
  out.set.box.id = box.id;
  out.set.tile_step.resize(n);
  for (int a = 0; a < n; ++a) {
    out.set.box.lo[a] = double(bl.klo[a]) / g.axes[a].period;
    out.set.box.hi[a] = double(bl.klo[a] + bl.width[a]) / g.axes[a].period;
    out.set.tile_step[a] = g.axes[a].period / double(bl.tiles[a]);
  }

  // coefficients w_T = <F, W_T> over the tile lattice
  std::vector<std::int64_t> t_idx(n, 0);
  std::int64_t tiles_total = 1;
  for (int a = 0; a < n; ++a) tiles_total *= bl.tiles[a];
  std::vector<double> box_center(n);
  for (int a = 0; a < n; ++a) box_center[a] = bl.eta_center[a] / g.axes[a].period;

  double coeff_sq = 0.0;
  for (std::int64_t t = 0; t < tiles_total; ++t) {
    std::vector<double> xT(n);
    for (int a = 0; a < n; ++a)
      xT[a] = g.axes[a].spatial_origin + double(t_idx[a]) * out.set.tile_step[a];
    cplx s{};
    for (std::size_t u = 0; u < ks.size(); ++u) {
      if (cf[u] == cplx{}) continue;
      double ph = 0.0;
      for (int a = 0; a < n; ++a) ph += double(ks[u][a]) / g.axes[a].period * xT[a];
      s += cf[u] * etas[u] * unit_phase(ph);
    }
    cplx w = vol * rho * s;
    coeff_sq += std::norm(w);
    WavePacket p;
    p.tube.center_base = xT;
    p.tube.freq_center = box_center;
    p.tube.scale = out.set.scale;
    p.coeff = w;
    out.set.packets.push_back(std::move(p));
    for (int a = n - 1; a >= 0; --a) {
      if (++t_idx[a] < bl.tiles[a]) break;
      t_idx[a] = 0;
    }
  }

  // reconstruction and the L2 comparability ratio
  std::vector<cplx> crec(ks.size(), cplx{});
  for (std::int64_t t = 0; t < tiles_total; ++t) {
    const auto& p = out.set.packets[t];
    if (p.coeff == cplx{}) continue;
    for (std::size_t u = 0; u < ks.size(); ++u) {
      if (etas[u] == 0.0) continue;
      double ph = 0.0;
      for (int a = 0; a < n; ++a)
        ph -= double(ks[u][a]) / g.axes[a].period * p.tube.center_base[a];
      crec[u] += p.coeff * rho * etas[u] * unit_phase(ph);
    }
  }
  double err = 0.0, ref = 0.0, rec_sq = 0.0;
  for (std::size_t u = 0; u < ks.size(); ++u) {
    err += std::norm(crec[u] - cf[u]);
    ref += std::norm(cf[u]);
    rec_sq += std::norm(crec[u]);
  }
  out.reconstruction_rel_l2 = ref > 0 ? std::sqrt(err / ref) : 0.0;
  out.l2_ratio = coeff_sq > 0 ? vol * rec_sq / coeff_sq : 1.0;
  return out;
}

namespace {
GridFunction rebuild_from_packets(const Grid& g, const BoxDecomposition& dec,
                                  const std::function<bool(const WavePacket&)>& keep) {
  const int n = g.dims();
  SmoothBump psi = build_bump();
  FreqBox padded = dec.set.box;
  // reconstruct the lattice description from the stored padded box
  GridFunction base = GridFunction::zeros(g);
  BoxLattice bl = snap_box(base, padded);
  double eta_sq_sum = 0.0;

  std::vector<std::vector<std::int64_t>> ks;
  std::vector<double> etas;
  {
    std::vector<std::int64_t> k(n), idx(n, 0);
    std::vector<std::int64_t> klo_ext(n), kcount(n);
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) {
      klo_ext[a] = bl.klo[a] - bl.width[a] / 2;
      kcount[a] = 2 * bl.width[a];
      total *= kcount[a];
    }
    for (std::int64_t u = 0; u < total; ++u) {
      for (int a = 0; a < n; ++a) k[a] = klo_ext[a] + idx[a];
      double e = eta_value(psi, bl, k);
      if (e != 0.0) {
        eta_sq_sum += e * e;
        ks.push_back(k);
        etas.push_back(e);
      }
      for (int a = n - 1; a >= 0; --a) {
        if (++idx[a] < kcount[a]) break;
        idx[a] = 0;
      }
    }
  }
  const double vol = g.box_volume();
  const double rho = 1.0 / std::sqrt(vol * eta_sq_sum);

  std::vector<Mode> modes;
  std::vector<cplx> acc(ks.size(), cplx{});
  for (const auto& p : dec.set.packets) {
    if (p.coeff == cplx{} || !keep(p)) continue;
    for (std::size_t u = 0; u < ks.size(); ++u) {
      double ph = 0.0;
      for (int a = 0; a < n; ++a)
        ph -= double(ks[u][a]) / g.axes[a].period * p.tube.center_base[a];
      acc[u] += p.coeff * rho * etas[u] * unit_phase(ph);
    }
  }
  for (std::size_t u = 0; u < ks.size(); ++u) {
    if (acc[u] != cplx{}) modes.push_back(Mode{ks[u], acc[u]});
  }
  return GridFunction::from_modes(g, modes);
}
}  // namespace

GridFunction box_level_slice(const GridFunction& f, const BoxDecomposition& dec,
                             double lambda) {
  return rebuild_from_packets(f.grid(), dec, [&](const WavePacket& p) {
    double m = std::abs(p.coeff);
    return m >= lambda && m < 2.0 * lambda;
  });
}

GridFunction box_rebuild(const Grid& g, const BoxDecomposition& dec) {
  return rebuild_from_packets(g, dec, [](const WavePacket&) { return true; });
}

GridFunction box_packet(const Grid& g, const BoxDecomposition& dec, std::size_t index) {
  BoxDecomposition one = dec;
  for (std::size_t i = 0; i < one.set.packets.size(); ++i)
    one.set.packets[i].coeff = (i == index) ? cplx{1.0, 0.0} : cplx{};
  return rebuild_from_packets(g, one, [](const WavePacket&) { return true; });
}

}  // namespace declab
