#include "declab/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace declab {

namespace {
constexpr double kQuarterPi = 0.78539816339744830962;

// exp(-1/t) for t > 0, else 0: the standard C-infinity cutoff ingredient
double cinf(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// smooth 0 -> 1 on [0,1], flat at both ends
double smooth01(double t) {
  double a = cinf(t);
  double b = cinf(1.0 - t);
  return a / (a + b);
}
}  // namespace

double SmoothBump::theta(double xi) const {
  if (xi >= 1.0 / 6.0) return kQuarterPi;
  if (xi <= -1.0 / 6.0) return -kQuarterPi;
  // odd ramp through [-1/6, 1/6]
  return kQuarterPi * (2.0 * smooth01((xi * 6.0 + 1.0) / 2.0) - 1.0);
}

double SmoothBump::alpha(double xi) const { return std::sin(theta(xi) + kQuarterPi); }
double SmoothBump::beta(double xi) const { return std::cos(theta(xi) + kQuarterPi); }

double SmoothBump::operator()(double xi) const {
  if (std::abs(xi) >= support_radius) return 0.0;
  if (std::abs(xi) <= plateau_radius) return 1.0;
  return alpha(xi + 0.5) * beta(xi - 0.5);
}

double SmoothBump::partition_deviation(int samples) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double xi = -1.5 + 3.0 * (i + 0.5) / samples;
    double s = 0.0;
    for (int l = -2; l <= 2; ++l) {
      double v = (*this)(xi - l);
      s += v * v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

SmoothBump build_bump() { return SmoothBump{}; }

double TensorBump::operator()(std::span<const double> xi) const {
  if (int(xi.size()) != dims) throw std::invalid_argument("dimension mismatch");
  double v = 1.0;
  for (double x : xi) {
    v *= psi(x);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double TensorBump::l2_norm(int samples_per_axis) const {
  // separable: ||gamma||_2^2 = (int psi^2)^d
  double h = 2.0 / samples_per_axis;
  double one_axis = 0.0;
  for (int i = 0; i < samples_per_axis; ++i) {
    double x = -1.0 + (i + 0.5) * h;
    double v = psi(x);
    one_axis += v * v * h;
  }
  return std::pow(one_axis, 0.5 * dims);
}

TensorBump gamma_tensor(int dims) {
  if (dims < 1) throw std::invalid_argument("dims must be >= 1");
  return TensorBump{dims, build_bump()};
}

}  // namespace declab
