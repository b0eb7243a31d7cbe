#pragma once

#include <cstdint>
#include <limits>

namespace tlc {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

__extension__ typedef unsigned __int128 u128;

}  // namespace detail

/// Counter-based 64-bit generator. The output at position k is a pure function
/// of (seed, stream, k), so substream t of a run can be rebuilt on any worker
/// and serial and parallel runs see identical draws.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed),
        stream_(stream),
        key_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                           detail::mix64(stream * 0xd1b54a32d192ed03ULL + 1))) {}

  /// Independent substream `stream` of master seed `seed`.
  static constexpr CounterRng substream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return CounterRng(seed, stream);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept { return next_u64(); }

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [lo, hi] (Lemire's multiply-and-reject).
  constexpr std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const std::uint64_t range = hi - lo;
    if (range == std::numeric_limits<std::uint64_t>::max()) return next_u64();
    const std::uint64_t span = range + 1;
    detail::u128 product = static_cast<detail::u128>(next_u64()) * span;
    auto low = static_cast<std::uint64_t>(product);
    if (low < span) {
      const std::uint64_t threshold = (0 - span) % span;
      while (low < threshold) {
        product = static_cast<detail::u128>(next_u64()) * span;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return lo + static_cast<std::uint64_t>(product >> 64);
  }

  /// Rademacher sign.
  constexpr int sign() noexcept { return (next_u64() >> 63) ? 1 : -1; }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }
  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tlc
