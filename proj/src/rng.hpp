#pragma once

#include <cstdint>
#include <random>

#include "distributions.hpp"

// Deterministic sampling layer. All non-uniform draws are built from the
// mt19937_64 stream with our own inverse-CDF / rejection samplers, so a seed
// pins the output bit-for-bit independent of the standard library.

namespace hw {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream-splitting rule for parallel work: mix the master seed with the task
// indices. Documented contract for the weather generator and PPC.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t a,
                                        std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ 0x5851f42d4c957f2dULL) + a * 0x9e3779b97f4a7c15ULL + b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0,1).
  double uniform() {
    std::uint64_t x = gen_();
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return norm_quantile(uniform()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log(uniform()); }

  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape) {
    if (shape < 1.0) {
      double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double uu = uniform();
      if (uu < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(uu) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a);
    double y = gamma(b);
    return x / (x + y);
  }

  bool bernoulli(double prob) { return uniform() < prob; }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hw
