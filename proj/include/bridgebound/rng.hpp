#pragma once

#include <cmath>
#include <cstdint>

namespace bridgebound {

// SplitMix64 generator with hand-rolled distributions.  std::mt19937 plus
// std:: distributions would work, but distribution output is not pinned by
// the standard; this keeps report files byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no cached state).
  double normal() {
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925287 * v);
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for one instance of a randomized suite.  Work split
/// across threads stays reproducible because each instance owns its stream.
inline Rng instance_rng(std::uint64_t seed, std::uint64_t instance) {
  Rng mixer(seed ^ (0x632be59bd9b4e019ull * (instance + 1)));
  std::uint64_t s = mixer.next_u64();
  return Rng(s);
}

}  // namespace bridgebound
