#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "agesched/network.hpp"

namespace agesched {

/// Randomized policy: set m is activated with probability probs[m], and the
/// residual mass 1 - sum(probs) idles.
struct StationaryState {
  std::vector<ActivationSet> sets;
  std::vector<double> probs;
};

/// Virtual-queue policy. q[e] >= 1 always holds.
struct VirtualQueueState {
  std::vector<double> q;
  double v_param = 1.0;
};

/// Age-based policy scoring link e by w_e * gamma_e * (A_e^2 + beta * A_e).
struct AgeBasedState {
  double beta = 1.0;
};

struct RoundRobinState {
  LinkIndex next_index = 0;
};

using PolicyState = std::variant<StationaryState, VirtualQueueState, AgeBasedState, RoundRobinState>;

/// What the scheduler learns about slot t-1: the set it scheduled and which
/// of those links delivered. Channel states of unscheduled links are never
/// reported.
struct SlotFeedback {
  ActivationSet scheduled;
  std::vector<bool> successes;
};

enum class PolicyKind { stationary, virtual_queue, age_based, round_robin };

/// Kind plus tunables; the string form (e.g. "piQ(V=1)") is used as the
/// policy column in result files.
struct PolicyDescriptor {
  PolicyKind kind = PolicyKind::stationary;
  double v_param = 1.0;
  double beta = 1.0;

  std::string name() const;
  friend bool operator==(const PolicyDescriptor&, const PolicyDescriptor&) = default;
};

std::string kind_name(PolicyKind kind);

StationaryState make_stationary(const NetworkSpec& spec, std::vector<ActivationSet> sets,
                                std::vector<double> probs);
VirtualQueueState make_virtual_queue(const NetworkSpec& spec, double v_param = 1.0);
/// Rejects beta < -1: below that A^2 + beta*A is negative at A = 1.
AgeBasedState make_age_based(double beta = 1.0);
RoundRobinState make_round_robin(const NetworkSpec& spec, LinkIndex start = 0);

/// Inverse-CDF draw over the ordered support using a single uniform in [0,1).
ActivationSet stationary_decide(const StationaryState& state, double uniform);

VirtualQueueState vq_update(VirtualQueueState state, const SlotFeedback& feedback);
ActivationSet vq_decide(const VirtualQueueState& state, const NetworkSpec& spec);
ActivationSet age_decide(const AgeBasedState& state, std::span<const std::int64_t> ages,
                         const NetworkSpec& spec);
std::pair<ActivationSet, RoundRobinState> round_robin_decide(RoundRobinState state,
                                                             const NetworkSpec& spec);

/// The per-slot contract shared by every policy: observe the previous slot's
/// feedback, then decide the current slot's activation set. The scheduler
/// never sees the current slot's channel state.
class Scheduler {
 public:
  Scheduler(const NetworkSpec& spec, PolicyState state);

  /// Called at the start of every slot t >= 1 with the outcome of slot t-1.
  void observe(const SlotFeedback& feedback);

  /// `uniform` is consumed by the stationary policy only.
  const ActivationSet& decide(std::span<const std::int64_t> ages, double uniform);

  const PolicyState& state() const noexcept { return state_; }
  PolicyKind kind() const noexcept;

 private:
  const NetworkSpec* spec_;
  PolicyState state_;
  std::vector<double> scratch_;
  ActivationSet decision_;
};

}  // namespace agesched
