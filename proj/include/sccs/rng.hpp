#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace sccs {

// Counter-based deterministic generator. A StreamRng is a pure function of
// (seed, stream id sequence); draws are addressed by counter, so independent
// workers can sample the same codebook bit-exactly in any order.

inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    key_ = mix64(seed);
    for (std::uint64_t s : stream) key_ = mix64(key_ ^ mix64(s));
  }
  StreamRng(std::uint64_t seed, const std::vector<std::uint64_t>& stream) {
    key_ = mix64(seed);
    for (std::uint64_t s : stream) key_ = mix64(key_ ^ mix64(s));
  }

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ + counter * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Inverse-CDF draw. Zero-mass symbols are never selected; if u lands past the
/// accumulated total (round-off), the last positive-mass symbol is returned.
inline std::size_t sample_categorical(const std::vector<double>& pmf, double u) {
  double cum = 0.0;
  std::size_t last_positive = pmf.size();
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    cum += pmf[i];
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;  // pmf.size() only if the pmf was all-zero
}

}  // namespace sccs
