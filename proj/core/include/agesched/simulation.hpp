#pragma once

#include <cstdint>
#include <vector>

#include "agesched/metrics.hpp"
#include "agesched/network.hpp"
#include "agesched/policy.hpp"
#include "agesched/rng.hpp"
#include "agesched/trace.hpp"

namespace agesched {

struct RunConfig {
  std::uint64_t horizon = 100000;
  std::uint64_t seed = 1;
  TraceLevel trace_level = TraceLevel::none;
  /// Slots simulated before recording starts. Slot indices (and hence random
  /// draws) keep counting through the warm-up.
  std::uint64_t warmup = 0;
  /// Recorded-slot counts at which running estimates are captured.
  std::vector<std::uint64_t> checkpoints;
};

/// All ages start at 1.
AgeVector initial_ages(const NetworkSpec& spec);

/// A_e(t+1) = 1 if e is scheduled and its channel is on, A_e(t) + 1 otherwise.
AgeVector step_age(const AgeVector& ages, const ActivationSet& scheduled, const ChannelDraw& draw);

/// Bernoulli(gamma_e) state for every link of slot `slot`, in link order.
ChannelDraw draw_channels(const NetworkSpec& spec, const CounterRng& rng, std::uint64_t slot);

/// Closed-loop run. Within slot t: the policy observes the outcome of t-1,
/// decides m_t, channels are drawn, ages advance.
SimulationResult run_simulation(const NetworkSpec& spec, const PolicyState& policy, const PolicyDescriptor& descriptor,
                                const RunConfig& run);

/// Descriptor inferred from the state (stationary, round robin, or the
/// tunables held by the state).
SimulationResult run_simulation(const NetworkSpec& spec, const PolicyState& policy, const RunConfig& run);

PolicyDescriptor describe(const PolicyState& policy);

}  // namespace agesched
