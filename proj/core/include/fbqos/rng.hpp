#pragma once

#include <cmath>
#include <cstdint>

namespace fbqos {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix_bits(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based substream: (seed, index) keys a splitmix64 walk from a
// hashed start state, so any single realization is replayable in isolation
// and draws never depend on which worker produced neighbouring indices.
class SubStream {
 public:
  SubStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix_bits(seed + kGoldenGamma) ^
               mix_bits((index + 1) * 0xBF58476D1CE4E5B9ull)) {}

  std::uint64_t next_u64() {
    state_ += kGoldenGamma;
    return mix_bits(state_);
  }

  // Uniform on (0, 1]; never 0, so logs stay finite.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller with pair caching. Hand-rolled rather than
  // std::normal_distribution so streams are bit-identical across standard
  // library implementations.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fbqos
