#pragma once

#include <cstdint>
#include <random>

namespace geocert {

/// A keyed random stream. Children are derived from (key, index) only, so a
/// computation that draws from `child(i)` for its i-th unit of work gets the
/// same numbers however the work is split or ordered.
class RngStream {
 public:
  constexpr explicit RngStream(std::uint64_t key) : key_(mix(key)) {}

  [[nodiscard]] constexpr RngStream child(std::uint64_t index) const {
    RngStream s(0);
    s.key_ = mix(key_ + 0x9E3779B97F4A7C15ull * (index + 1));
    return s;
  }

  [[nodiscard]] std::mt19937_64 engine() const { return std::mt19937_64(key_); }

  [[nodiscard]] constexpr std::uint64_t key() const { return key_; }

 private:
  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

/// Uniform draw strictly inside (0, 1).
inline double open_unit(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace geocert
