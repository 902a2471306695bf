#include "agesched/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace agesched {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void vq_values(const VirtualQueueState& state, const NetworkSpec& spec, std::vector<double>& values) {
  values.resize(spec.link_count());
  for (LinkIndex e = 0; e < values.size(); ++e) {
    values[e] = spec.weights[e] * spec.success_probs[e] * state.q[e];
  }
}

void age_values(const AgeBasedState& state, std::span<const std::int64_t> ages, const NetworkSpec& spec,
                std::vector<double>& values) {
  if (ages.size() != spec.link_count()) throw std::invalid_argument("age_decide: age vector size mismatch");
  values.resize(spec.link_count());
  for (LinkIndex e = 0; e < values.size(); ++e) {
    const double a = static_cast<double>(ages[e]);
    // beta >= -1 and a >= 1 keep this non-negative; clamp rounding noise at a == 1, beta == -1.
    values[e] = std::max(0.0, spec.weights[e] * spec.success_probs[e] * (a * a + state.beta * a));
  }
}

}  // namespace

std::string kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::stationary: return "piC";
    case PolicyKind::virtual_queue: return "piQ";
    case PolicyKind::age_based: return "piA";
    case PolicyKind::round_robin: return "roundrobin";
  }
  return "unknown";
}

std::string PolicyDescriptor::name() const {
  switch (kind) {
    case PolicyKind::virtual_queue: return "piQ(V=" + format_param(v_param) + ")";
    case PolicyKind::age_based: return "piA(beta=" + format_param(beta) + ")";
    default: return kind_name(kind);
  }
}

StationaryState make_stationary(const NetworkSpec& spec, std::vector<ActivationSet> sets,
                                std::vector<double> probs) {
  // activation_frequencies performs all the support checks.
  (void)activation_frequencies(spec, sets, probs);
  return StationaryState{std::move(sets), std::move(probs)};
}

VirtualQueueState make_virtual_queue(const NetworkSpec& spec, double v_param) {
  if (!(std::isfinite(v_param) && v_param > 0.0)) throw std::invalid_argument("virtual queue: V must be positive");
  return VirtualQueueState{std::vector<double>(spec.link_count(), 1.0), v_param};
}

AgeBasedState make_age_based(double beta) {
  if (!std::isfinite(beta) || beta < -1.0) {
    throw std::invalid_argument("age-based policy: beta must be finite and at least -1");
  }
  return AgeBasedState{beta};
}

RoundRobinState make_round_robin(const NetworkSpec& spec, LinkIndex start) {
  if (!singletons_feasible(spec)) throw std::invalid_argument("round robin: some single-link set is infeasible");
  if (start >= spec.link_count()) throw std::invalid_argument("round robin: start index out of range");
  return RoundRobinState{start};
}

ActivationSet stationary_decide(const StationaryState& state, double uniform) {
  double cumulative = 0.0;
  for (std::size_t m = 0; m < state.probs.size(); ++m) {
    cumulative += state.probs[m];
    if (uniform < cumulative) return state.sets[m];
  }
  return {};
}

VirtualQueueState vq_update(VirtualQueueState state, const SlotFeedback& feedback) {
  for (LinkIndex e = 0; e < state.q.size(); ++e) {
    const double served = (e < feedback.successes.size() && feedback.successes[e]) ? 1.0 : 0.0;
    const double next = state.q[e] + std::sqrt(state.v_param / state.q[e]) - served;
    state.q[e] = std::max(next, 1.0);
  }
  return state;
}

ActivationSet vq_decide(const VirtualQueueState& state, const NetworkSpec& spec) {
  std::vector<double> values;
  vq_values(state, spec, values);
  return max_weight_set(spec, values);
}

ActivationSet age_decide(const AgeBasedState& state, std::span<const std::int64_t> ages,
                         const NetworkSpec& spec) {
  std::vector<double> values;
  age_values(state, ages, spec, values);
  return max_weight_set(spec, values);
}

std::pair<ActivationSet, RoundRobinState> round_robin_decide(RoundRobinState state, const NetworkSpec& spec) {
  ActivationSet chosen({state.next_index});
  state.next_index = (state.next_index + 1) % spec.link_count();
  return {std::move(chosen), state};
}

Scheduler::Scheduler(const NetworkSpec& spec, PolicyState state) : spec_(&spec), state_(std::move(state)) {
  std::visit(overloaded{
                 [&](const StationaryState& s) { (void)activation_frequencies(spec, s.sets, s.probs); },
                 [&](const VirtualQueueState& s) {
                   if (s.q.size() != spec.link_count()) throw std::invalid_argument("virtual queue size mismatch");
                 },
                 [&](const AgeBasedState& s) { (void)make_age_based(s.beta); },
                 [&](const RoundRobinState& s) { (void)make_round_robin(spec, s.next_index); },
             },
             state_);
}

PolicyKind Scheduler::kind() const noexcept {
  return static_cast<PolicyKind>(state_.index());
}

void Scheduler::observe(const SlotFeedback& feedback) {
  if (auto* vq = std::get_if<VirtualQueueState>(&state_)) *vq = vq_update(std::move(*vq), feedback);
}

const ActivationSet& Scheduler::decide(std::span<const std::int64_t> ages, double uniform) {
  std::visit(overloaded{
                 [&](const StationaryState& s) { decision_ = stationary_decide(s, uniform); },
                 [&](const VirtualQueueState& s) {
                   vq_values(s, *spec_, scratch_);
                   max_weight_set(*spec_, scratch_, decision_);
                 },
                 [&](const AgeBasedState& s) {
                   age_values(s, ages, *spec_, scratch_);
                   max_weight_set(*spec_, scratch_, decision_);
                 },
                 [&](RoundRobinState& s) { std::tie(decision_, s) = round_robin_decide(s, *spec_); },
             },
             state_);
  return decision_;
}

}  // namespace agesched
