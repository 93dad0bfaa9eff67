#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace gcspn {

/// Deterministic 64-bit generator used wherever the library needs randomness.
///
/// The sequence is fully specified so that seeded runs are reproducible across
/// platforms and builds:
///   - state seeding: four draws of splitmix64 applied to the seed
///   - stream: xoshiro256** (Blackman/Vigna)
///   - uniform doubles: top 53 bits of the next output, scaled by 2^-53
///   - bounded indices: 128-bit multiply-high of the next output with n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). n must be nonzero.
  std::size_t uniform_index(std::size_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::size_t>((u128(next()) * u128(n)) >> 64);
  }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// Derives an independent child seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t s = base;
  const std::uint64_t a = Rng::splitmix64(s);
  s ^= tag * 0x9E3779B97F4A7C15ULL;
  return a ^ Rng::splitmix64(s);
}

/// In-place Fisher-Yates shuffle driven by the library generator.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  if (items.size() < 2) return;
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    const std::size_t j = rng.uniform_index(i + 1);
    std::swap(items[i], items[j]);
  }
}

}  // namespace gcspn
