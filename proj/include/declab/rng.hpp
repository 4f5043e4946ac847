#pragma once

#include <cmath>
#include <cstdint>

namespace declab {

// Deterministic splitmix64-based generator. All randomized suites draw from
// this so a fixed seed reproduces results byte-for-byte across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi_inclusive) {
    return lo + std::int64_t(next_u64() % std::uint64_t(hi_inclusive - lo + 1));
  }

  // standard normal, Box-Muller (two uniforms per call; second value dropped
  // to keep the draw sequence simple and deterministic)
  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  Rng fork(std::uint64_t stream) {
    Rng r(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace declab
