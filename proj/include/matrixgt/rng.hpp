#pragma once

#include <cstdint>

namespace matrixgt {

/// SplitMix64 finalizer. Used to derive well-mixed, nonzero generator states.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the generator that drives frame `frame_idx` of a scenario:
/// splitmix64_mix(seed + 0x9E3779B97F4A7C15 * (frame_idx + 1)), with 0 mapped to
/// 0x9E3779B97F4A7C15 so the xorshift state is never zero.
constexpr std::uint64_t frame_stream_seed(std::uint64_t seed, std::uint64_t frame_idx) noexcept {
  const std::uint64_t s = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL * (frame_idx + 1));
  return s == 0 ? 0x9E3779B97F4A7C15ULL : s;
}

/// xorshift64* (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).
///
/// The sequence is fully specified so scenes are reproducible across platforms and
/// language bindings:
///   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D;
/// uniform() maps the top 53 bits to [0, 1); uniform_int(lo, hi) is lo + next() % (hi - lo + 1).
class Xorshift64Star {
 public:
  explicit constexpr Xorshift64Star(std::uint64_t state) noexcept
      : state_(state == 0 ? 0x9E3779B97F4A7C15ULL : state) {}

  constexpr std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(span == 0 ? next() : next() % span);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace matrixgt
