#pragma once

#include <cstdint>
#include <limits>

namespace kspic {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Reserved stream index for initial-condition sampling (macro steps never reach it).
inline constexpr std::uint64_t kInitStream = std::numeric_limits<std::uint64_t>::max();

/// xoshiro256** generator whose state is derived from a (seed, id, stream) triple, so every
/// particle gets an independent, reproducible stream per macro step regardless of which
/// thread advances it. Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t id, std::uint64_t stream) {
    std::uint64_t sm = seed;
    std::uint64_t key = splitmix64(sm);
    sm = key ^ (id * 0xd1b54a32d192ed03ULL);
    key = splitmix64(sm);
    sm = key ^ (stream * 0x8cb92ba72f3d8dd7ULL);
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

}  // namespace kspic
