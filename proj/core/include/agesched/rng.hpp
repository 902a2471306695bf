#pragma once

#include <cstdint>

namespace agesched {

/// Counter-based uniform stream. Every draw is a pure function of
/// (seed, slot, lane): the channel state of link e in slot t always uses lane
/// e, and policy randomness uses `kPolicyLane`. Two policies simulated on the
/// same seed therefore see identical channel realizations.
///
/// The mixer is three rounds of the SplitMix64 finalizer over the seed, slot
/// and lane words; the top 53 bits of the result form a double in [0, 1).
/// Changing this function changes every published result, so it is frozen.
class CounterRng {
 public:
  static constexpr std::uint64_t kPolicyLane = ~std::uint64_t{0};

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix(seed + 0x9E3779B97F4A7C15ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t slot, std::uint64_t lane) const noexcept {
    std::uint64_t h = mix(key_ ^ (slot * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL));
    return mix(h ^ (lane * 0xD6E8FEB86659FD93ULL + 0x9E3779B97F4A7C15ULL));
  }

  constexpr double uniform(std::uint64_t slot, std::uint64_t lane) const noexcept {
    return static_cast<double>(bits(slot, lane) >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace agesched
