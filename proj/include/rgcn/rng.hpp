#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace rgcn {

/// SplitMix64 finalizer. Used as the mixing function for all counter-based streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

template <class... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Rest... rest) {
  std::uint64_t h = mix64(seed);
  ((h = hash_combine(h, static_cast<std::uint64_t>(rest))), ...);
  return h;
}

/// Maps 64 random bits to a double uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based stream: the k-th draw depends only on (key, k), so results never
/// depend on thread scheduling or on how many draws other streams consumed.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  double uniform() { return to_unit((*this)()); }

  /// Box-Muller; no cached second variate so the stream stays stateless per draw pair.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform draw for an unordered pair, keyed on (seed, min, max).
inline double pair_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  if (a > b) std::swap(a, b);
  return to_unit(mix64(hash_combine(hash_combine(mix64(seed), a), b)));
}

}  // namespace rgcn
