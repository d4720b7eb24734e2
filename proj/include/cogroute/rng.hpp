#pragma once

// Portable random streams. std::*_distribution output is implementation
// defined, so sampling is done here on top of std::mt19937_64 (whose output
// sequence is fixed by the standard) to keep runs identical across toolchains.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace cogroute {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, for naming streams.
constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream keyed by (seed, name, index).
  RandomStream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0)
      : RandomStream(splitmix64(seed ^ splitmix64(hash_name(name) + splitmix64(index)))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Box-Muller; one draw pair per call.
  double normal(double mean, double sd) {
    if (sd <= 0.0) return mean;
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

  /// Knuth's multiplication method; fine for the small per-epoch rates used here.
  int poisson(double rate) {
    if (rate <= 0.0) return 0;
    const double limit = std::exp(-rate);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

  /// Index drawn from a discrete distribution; falls back to the last index
  /// when rounding leaves the cumulative sum just short of u.
  template <typename Weights>
  std::size_t categorical(const Weights& weights) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t i = 0;
    for (double w : weights) {
      acc += w;
      if (u < acc) return i;
      ++i;
    }
    return i == 0 ? 0 : i - 1;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace cogroute
