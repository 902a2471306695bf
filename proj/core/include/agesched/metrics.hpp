#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agesched/network.hpp"
#include "agesched/policy.hpp"
#include "agesched/stationary.hpp"
#include "agesched/trace.hpp"

namespace agesched {

/// Statistical tolerances used by every empirical check. Both are relative.
///
/// identity: two estimators of the same long-run quantity (time conservation,
/// the squared-age identity, bound verdicts). At T = 1e5 slots and success
/// probabilities >= 0.1 the renewal-reward standard error of these ratios is
/// below 0.5%, so 2% is four standard errors.
///
/// mean: an empirical mean against its analytic value. A geometric peak with
/// success rate p has standard deviation sqrt(1-p)/p; with >= 2000 renewals
/// per link at T = 1e5 the relative standard error is under 2.3%, so 5% is
/// two standard errors in the worst configuration and far more in typical
/// ones.
namespace tolerance {
inline constexpr double identity = 0.02;
inline constexpr double mean = 0.05;
}  // namespace tolerance

/// Exact integer sums kept per link while a run executes.
struct LinkAccumulators {
  std::uint64_t age_sum = 0;             // sum_t A_e(t)
  std::uint64_t peak_sum = 0;            // sum_t U_e S_e A_e(t)
  std::uint64_t successes = 0;           // sum_t U_e S_e
  std::uint64_t activations = 0;         // sum_t U_e
  std::uint64_t scheduled_age_sum = 0;   // sum_t U_e A_e(t)
  std::uint64_t scheduled_age_sq_sum = 0;  // sum_t U_e A_e(t)^2

  friend bool operator==(const LinkAccumulators&, const LinkAccumulators&) = default;
};

/// Running estimates after the first `t` recorded slots.
struct Checkpoint {
  std::uint64_t t = 0;
  std::vector<double> per_link_peak;
  std::vector<double> per_link_avg;
  double network_peak = 0.0;
  double network_avg = 0.0;
  std::vector<LinkAccumulators> accumulators;
};

struct SimulationResult {
  std::vector<double> per_link_peak;
  std::vector<double> per_link_avg;
  double network_peak = 0.0;
  double network_avg = 0.0;
  std::vector<std::uint64_t> success_counts;
  std::vector<std::uint64_t> activation_counts;
  std::vector<double> conservation_residual;
  std::uint64_t horizon = 0;
  PolicyDescriptor policy;

  std::vector<LinkAccumulators> accumulators;
  std::vector<Checkpoint> checkpoints;
  AgeVector initial_ages;  // ages at the first recorded slot
  std::vector<SlotTrace> trace;
};

/// Streaming fold of one run. `record` takes the ages at the start of the
/// slot, the scheduled set and the per-link success bitmap.
class AgeStatistics {
 public:
  explicit AgeStatistics(std::size_t link_count);

  void record(std::span<const std::int64_t> ages, const ActivationSet& scheduled,
              const std::vector<bool>& successes);

  std::uint64_t slots() const noexcept { return slots_; }
  const std::vector<LinkAccumulators>& accumulators() const noexcept { return acc_; }

  Checkpoint snapshot(std::span<const double> weights) const;

  /// Fills every metric field of `result` from the accumulated sums.
  void finalize(std::span<const double> weights, SimulationResult& result) const;

 private:
  std::vector<LinkAccumulators> acc_;
  std::uint64_t slots_ = 0;
};

/// Mean of the ages observed at success instants; +infinity when empty.
double peak_age_estimate(std::span<const std::int64_t> peaks);

/// Time average of an age trajectory.
double avg_age_estimate(std::span<const std::int64_t> ages);

/// Per-link (1/T) sum U_e S_e A_e - 1.
std::vector<double> conservation_check(const SimulationResult& result);

struct IdentityPair {
  double direct_avg = 0.0;
  double identity_avg = 0.0;
};

/// Both sides of the squared-age identity
///   avg_e = (1/2) timeavg(gamma_e U_e (A_e^2 + beta A_e)) + (1 - beta)/2
/// from the streaming accumulators.
std::vector<IdentityPair> lemma2_identity_check(const SimulationResult& result, const NetworkSpec& spec,
                                                double beta);

/// Same check recomputed from a per-slot trace (requires TraceLevel::full).
std::vector<IdentityPair> lemma2_identity_check(std::span<const SlotTrace> trace, const AgeVector& initial,
                                                const NetworkSpec& spec, double beta);

enum class BoundName { thm2_peak, thm3_peak, thm3_avg, lemma4, eq12_lower };

std::string bound_name(BoundName name);

/// A verdict `lhs <= rhs` checked with `tolerance::identity` relative slack.
/// `slack` is rhs - lhs.
struct BoundReport {
  BoundName name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double slack = 0.0;
};

/// Additive constants of the age-based policy guarantee.
double age_policy_c1(double beta);
double age_policy_c2(double beta);

/// Reports every bound that applies to the run's policy:
///  - all runs: peak <= 2 avg - sum w, and avg >= (peak_opt + sum w) / 2;
///  - virtual queue: peak <= peak_opt + sum w / 2 + sum w / (2V);
///  - age-based: peak <= 4 peak_opt - c2(beta) sum w and, when the network
///    average of the optimal stationary policy is supplied,
///    avg <= 4 avg_stationary - c1(beta) sum w. The latter compares against
///    the stationary policy's average instead of the unknown optimum, so it is
///    only a necessary condition.
std::vector<BoundReport> bound_reports(const SimulationResult& result, const StationarySolution& solution,
                                       const NetworkSpec& spec,
                                       std::optional<double> stationary_network_avg = std::nullopt);

}  // namespace agesched
