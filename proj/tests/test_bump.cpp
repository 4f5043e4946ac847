#include <cmath>

#include "doctest.h"

#include "declab/bump.hpp"

using namespace declab;

TEST_CASE("profile plateau, support, and the half-integer identity") {
  SmoothBump psi = build_bump();
  CHECK(psi(0.0) == 1.0);
  CHECK(psi(0.3) == 1.0);
  CHECK(psi(-1.0 / 3.0) == 1.0);
  CHECK(psi(0.7) == 0.0);
  CHECK(psi(-0.7) == 0.0);
  double a = psi(0.5), b = psi(-0.5);
  CHECK(a * a + b * b == doctest::Approx(1.0).epsilon(1e-14));
  // smooth, monotone transition on [1/3, 2/3]
  double prev = 1.0;
  for (int i = 0; i <= 32; ++i) {
    double x = 1.0 / 3.0 + i * (1.0 / 3.0) / 32.0;
    double v = psi(x);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("odd ramp hits the quarter circle parametrization") {
  SmoothBump psi = build_bump();
  CHECK(psi.theta(0.2) == doctest::Approx(M_PI / 4));
  CHECK(psi.theta(-0.2) == doctest::Approx(-M_PI / 4));
  CHECK(psi.theta(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  for (double x : {-0.12, -0.03, 0.0, 0.08, 0.15}) {
    double al = psi.alpha(x), be = psi.beta(x);
    CHECK(al * al + be * be == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi.alpha(-x) == doctest::Approx(psi.beta(x)).epsilon(1e-14));
  }
}

TEST_CASE("translates square-sum to one") {
  SmoothBump psi = build_bump();
  CHECK(psi.partition_deviation(100000) <= 1e-12);
}

TEST_CASE("tensor bump is normalized in L2") {
  for (int d : {1, 2, 3}) {
    TensorBump gamma = gamma_tensor(d);
    CHECK(std::abs(gamma.l2_norm(4096) - 1.0) <= 1e-8);
  }
  TensorBump g2 = gamma_tensor(2);
  std::vector<double> origin{0.0, 0.0};
  CHECK(g2(origin) == 1.0);
  std::vector<double> outside{0.7, 0.1};
  CHECK(g2(outside) == 0.0);
}
