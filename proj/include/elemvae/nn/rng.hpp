#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace elemvae::nn {

/// Deterministic random source. std:: distributions are implementation
/// defined, so uniform/normal are derived from raw mt19937_64 output here;
/// the same seed gives the same stream on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// standard normal via Box-Muller; two uniforms per draw, no cached spare
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// uniform integer in [0, n); modulo bias is irrelevant at shuffle scale
  std::uint64_t below(std::uint64_t n) { return bits() % n; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// independent stream derived from a base seed and a stream id
  static Rng stream(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (id + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return Rng(x);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace elemvae::nn
