#include "agesched/simulation.hpp"

#include <algorithm>
#include <stdexcept>

namespace agesched {

AgeVector initial_ages(const NetworkSpec& spec) {
  return AgeVector(spec.link_count(), 1);
}

AgeVector step_age(const AgeVector& ages, const ActivationSet& scheduled, const ChannelDraw& draw) {
  AgeVector next(ages.size());
  for (std::size_t e = 0; e < ages.size(); ++e) next[e] = ages[e] + 1;
  for (LinkIndex e : scheduled.members) {
    if (draw.states[e]) next[e] = 1;
  }
  return next;
}

ChannelDraw draw_channels(const NetworkSpec& spec, const CounterRng& rng, std::uint64_t slot) {
  ChannelDraw draw;
  draw.states.resize(spec.link_count());
  for (LinkIndex e = 0; e < spec.link_count(); ++e) {
    draw.states[e] = rng.uniform(slot, e) < spec.success_probs[e];
  }
  return draw;
}

PolicyDescriptor describe(const PolicyState& policy) {
  PolicyDescriptor d;
  d.kind = static_cast<PolicyKind>(policy.index());
  if (const auto* vq = std::get_if<VirtualQueueState>(&policy)) d.v_param = vq->v_param;
  if (const auto* ab = std::get_if<AgeBasedState>(&policy)) d.beta = ab->beta;
  return d;
}

SimulationResult run_simulation(const NetworkSpec& spec, const PolicyState& policy, const RunConfig& run) {
  return run_simulation(spec, policy, describe(policy), run);
}

SimulationResult run_simulation(const NetworkSpec& spec, const PolicyState& policy, const PolicyDescriptor& descriptor,
                                const RunConfig& run) {
  require_valid(spec);
  if (run.horizon == 0) throw std::invalid_argument("run_simulation: horizon must be at least 1");

  const std::size_t n = spec.link_count();
  const CounterRng rng(run.seed);
  Scheduler scheduler(spec, policy);
  AgeStatistics stats(n);

  std::vector<std::uint64_t> checkpoints = run.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  auto next_checkpoint = checkpoints.begin();

  SimulationResult result;
  result.policy = descriptor;

  AgeVector ages = initial_ages(spec);
  SlotFeedback feedback;
  feedback.successes.assign(n, false);
  std::vector<bool> channel(n);

  const std::uint64_t total = run.warmup + run.horizon;
  for (std::uint64_t t = 0; t < total; ++t) {
    if (t > 0) scheduler.observe(feedback);
    const ActivationSet& scheduled = scheduler.decide(ages, rng.uniform(t, CounterRng::kPolicyLane));

    for (LinkIndex e = 0; e < n; ++e) channel[e] = rng.uniform(t, e) < spec.success_probs[e];

    // Feedback for the next slot doubles as this slot's success bitmap.
    for (LinkIndex e : feedback.scheduled.members) feedback.successes[e] = false;
    feedback.scheduled = scheduled;
    for (LinkIndex e : scheduled.members) feedback.successes[e] = channel[e];

    const bool recording = t >= run.warmup;
    if (recording) {
      if (t == run.warmup) result.initial_ages = ages;
      stats.record(ages, scheduled, feedback.successes);
    }

    for (LinkIndex e = 0; e < n; ++e) ++ages[e];
    for (LinkIndex e : scheduled.members) {
      if (channel[e]) ages[e] = 1;
    }

    if (recording) {
      if (run.trace_level != TraceLevel::none) {
        SlotTrace slot{t - run.warmup, scheduled, feedback.successes, {}};
        if (run.trace_level == TraceLevel::full) slot.ages_after = ages;
        result.trace.push_back(std::move(slot));
      }
      while (next_checkpoint != checkpoints.end() && *next_checkpoint == stats.slots()) {
        result.checkpoints.push_back(stats.snapshot(spec.weights));
        ++next_checkpoint;
      }
    }
  }

  stats.finalize(spec.weights, result);
  return result;
}

}  // namespace agesched
