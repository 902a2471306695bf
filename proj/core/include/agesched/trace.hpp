#pragma once

#include <cstdint>
#include <vector>

#include "agesched/network.hpp"

namespace agesched {

/// Per-link ages A_e(t) in slots; always >= 1.
using AgeVector = std::vector<std::int64_t>;

/// Channel states S_e(t) for every link in one slot.
struct ChannelDraw {
  std::vector<bool> states;
};

enum class TraceLevel {
  none,        // metrics only
  aggregates,  // per-slot schedule and success bitmap
  full,        // additionally the age vector after each slot
};

struct SlotTrace {
  std::uint64_t t = 0;
  ActivationSet scheduled;
  std::vector<bool> successes;  // U_e(t) S_e(t); false off the scheduled set
  AgeVector ages_after;         // filled only at TraceLevel::full
};

}  // namespace agesched
