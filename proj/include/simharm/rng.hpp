#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace simharm {

// Seeded random source with hand-mapped distributions. std:: distribution
// objects are implementation-defined, which would break the byte-identical
// report guarantee for a fixed seed; the mappings below are pinned.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform in [0, n). Modulo bias is below 2^-50 for the n used here.
  std::uint64_t index(std::uint64_t n) { return bits() % n; }

  // Standard normal via Box-Muller; consumes exactly two draws per call.
  double normal() {
    double u1 = 0.0;
    do {
      u1 = unit();
    } while (u1 <= 0.0);
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace simharm
