#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace patchmodels {

// Derives an independent child seed from (seed, stream) via splitmix64.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is pinned by the standard, and the Gaussian transform is an
// explicit Box-Muller on 53-bit midpoint uniforms, so values are bit-identical
// across platforms and standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit && limit != 0);
    return x % n;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace patchmodels
