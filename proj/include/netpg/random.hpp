#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace netpg {

// The single seeded stream a simulation draws from. Uniforms are built from
// the top 53 bits of mt19937_64 so the sequence is identical on every
// standard library (std::uniform_real_distribution is not).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

// Inverse-CDF pick over ordered weights summing to 1. Rounding slack at the
// top end falls on the last slot with non-zero weight.
inline std::size_t pick_index(std::span<const double> weights, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace netpg
