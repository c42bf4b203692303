#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>

namespace canfilt {

// Counter-based random numbers.
//
// Every random quantity in this library is addressable as a pure function of
// (seed, counter), so reruns are bit-identical on a given platform and draws
// can be produced out of order or concurrently.  The full recipe:
//
//   word(seed, k) = finalize(seed + (k + 1) * 0x9E3779B97F4A7C15)
//
// where finalize is the SplitMix64 output function
//
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27;  z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
//
// uniform01(seed, k)        top 53 bits of word k, scaled to [0, 1).
// counter_normal(seed, k)   Box-Muller on words 2k and 2k+1:
//                             u1 = ((word(2k)   >> 11) + 1) * 2^-53   in (0, 1]
//                             u2 =  (word(2k+1) >> 11)      * 2^-53   in [0, 1)
//                             z  = sqrt(-2 ln u1) * cos(2 pi u2)
//                           The sine companion is discarded so that draw k
//                           stays independently addressable.

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

[[nodiscard]] constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

[[nodiscard]] constexpr std::uint64_t random_word(std::uint64_t seed, std::uint64_t k) noexcept {
  return splitmix64_finalize(seed + (k + 1) * kSplitMix64Gamma);
}

/// k-th uniform draw in [0, 1).
template <std::floating_point T = double>
[[nodiscard]] T counter_uniform01(std::uint64_t seed, std::uint64_t k) noexcept {
  return static_cast<T>(random_word(seed, k) >> 11) * static_cast<T>(0x1.0p-53);
}

namespace detail {

template <std::floating_point T>
[[nodiscard]] T normal_from_words(std::uint64_t seed, std::uint64_t word) noexcept {
  const T u1 = static_cast<T>((random_word(seed, word) >> 11) + 1) * static_cast<T>(0x1.0p-53);
  const T u2 = static_cast<T>(random_word(seed, word + 1) >> 11) * static_cast<T>(0x1.0p-53);
  return std::sqrt(T(-2) * std::log(u1)) * std::cos(T(2) * std::numbers::pi_v<T> * u2);
}

}  // namespace detail

/// k-th standard normal draw; consumes words 2k and 2k+1.
template <std::floating_point T = double>
[[nodiscard]] T counter_normal(std::uint64_t seed, std::uint64_t k) noexcept {
  return detail::normal_from_words<T>(seed, 2 * k);
}

/// Decorrelated seed for a numbered substream (trial index, worker id, ...).
[[nodiscard]] constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
  return random_word(seed ^ 0x6A09E667F3BCC909ULL, stream);
}

/// Cursor over the word sequence for draw-by-draw consumers (tests, oracles).
template <std::floating_point T = double>
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t start_word = 0) noexcept
      : seed_(seed), word_(start_word) {}

  T uniform01() noexcept { return static_cast<T>(random_word(seed_, word_++) >> 11) * static_cast<T>(0x1.0p-53); }

  T uniform(T lo, T hi) noexcept { return lo + (hi - lo) * uniform01(); }

  T normal() noexcept {
    const T z = detail::normal_from_words<T>(seed_, word_);
    word_ += 2;
    return z;
  }

  [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] constexpr std::uint64_t cursor() const noexcept { return word_; }

 private:
  std::uint64_t seed_;
  std::uint64_t word_;
};

}  // namespace canfilt
