#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace godl {

/// Seeded generator with fixed-algorithm draws, so results do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (two draws per value, none cached).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Unbiased integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  /// k distinct indices from [0, n), order of selection preserved.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

/// Stable seed derivation for independent sub-streams (unit index, sequence
/// index, sweep cell). SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace godl
