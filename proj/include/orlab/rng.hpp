#pragma once
// Deterministic random streams for the scheduling lab.
//
// Everything stochastic in the lab flows through Rng so that runs are
// bit-identical for a given seed regardless of platform/stdlib. That rules
// out std::gamma_distribution / std::poisson_distribution (implementation
// defined); the samplers here are the classic textbook ones:
//   - xoshiro256++ core, seeded via splitmix64
//   - Marsaglia-Tsang squeeze for Gamma(shape, scale)
//   - Knuth product method for Poisson (rates here are << 1)
//   - polar Marsaglia for standard normals (spare discarded so the draw
//     count per call is fixed)
// Common-random-numbers discipline: derive one child seed per purpose with
// derive_seed(base, index) and never share a stream across purposes.

#include <cstdint>
#include <cmath>

namespace orlab {

// splitmix64 step; also used to expand (base seed, index) into child seeds.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for stream `index` of a run with seed `base`. Two levels of
// splitmix mixing keep adjacent (base, index) pairs uncorrelated.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t s = base;
  std::uint64_t a = splitmix64(s);
  s ^= 0x6a09e667f3bcc909ULL + index;
  std::uint64_t b = splitmix64(s);
  std::uint64_t c = a ^ (b + (index << 1) + 1);
  return splitmix64(c);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  // xoshiro256++
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via polar Marsaglia; one accepted pair per call, the
  // second variate is discarded to keep the consumption pattern fixed.
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double r2 = u * u + v * v;
      if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
    }
  }

  // Gamma(shape, scale), Marsaglia-Tsang (2000). Boost branch handles
  // shape < 1 even though the lab's duration laws all have shape >= 2.
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  // Poisson(rate) by Knuth's product method; fine for the small per-slot
  // rates used here (0.08 by default).
  int poisson(double rate) {
    const double limit = std::exp(-rate);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  // Bernoulli(p).
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace orlab
