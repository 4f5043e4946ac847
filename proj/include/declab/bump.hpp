#pragma once

#include <span>
#include <vector>

namespace declab {

// The 1-d profile psi built from an odd smooth transition Theta with
// Theta = pi/4 beyond 1/6, via
//   alpha = sin(Theta + pi/4),  beta = cos(Theta + pi/4),
//   psi(xi) = alpha(xi + 1/2) * beta(xi - 1/2).
// psi = 1 on [-1/3, 1/3], vanishes outside [-2/3, 2/3], and its integer
// translates square-sum to one.
struct SmoothBump {
  double plateau_radius = 1.0 / 3.0;
  double support_radius = 2.0 / 3.0;

  double theta(double xi) const;
  double alpha(double xi) const;
  double beta(double xi) const;
  double operator()(double xi) const;  // psi

  // sup over a uniform sample of |sum_l psi(xi - l)^2 - 1|
  double partition_deviation(int samples = 100000) const;
};

SmoothBump build_bump();

// Tensor-product bump gamma(xi) = prod_j psi(xi_j) on R^d, unit L^2 norm.
struct TensorBump {
  int dims = 1;
  SmoothBump psi;

  double operator()(std::span<const double> xi) const;
  // quadrature of ||gamma||_2 over [-1,1]^d
  double l2_norm(int samples_per_axis = 2048) const;
};

TensorBump gamma_tensor(int dims);

}  // namespace declab
