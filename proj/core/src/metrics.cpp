#include "agesched/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace agesched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? kInf : static_cast<double>(num) / static_cast<double>(den);
}

double weighted_sum(std::span<const double> weights, const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t e = 0; e < values.size(); ++e) total += weights[e] * values[e];
  return total;
}

BoundReport make_report(BoundName name, double lhs, double rhs, double scale) {
  BoundReport r{name, lhs, rhs, false, rhs - lhs};
  r.satisfied = lhs <= rhs + tolerance::identity * std::abs(scale);
  return r;
}

std::vector<IdentityPair> identity_from_sums(const std::vector<LinkAccumulators>& acc, std::uint64_t slots,
                                             const NetworkSpec& spec, double beta) {
  std::vector<IdentityPair> out(acc.size());
  const double t = static_cast<double>(slots);
  for (std::size_t e = 0; e < acc.size(); ++e) {
    const double b_sum = static_cast<double>(acc[e].scheduled_age_sq_sum) +
                         beta * static_cast<double>(acc[e].scheduled_age_sum);
    out[e].direct_avg = static_cast<double>(acc[e].age_sum) / t;
    out[e].identity_avg = 0.5 * spec.success_probs[e] * b_sum / t + 0.5 * (1.0 - beta);
  }
  return out;
}

}  // namespace

AgeStatistics::AgeStatistics(std::size_t link_count) : acc_(link_count) {}

void AgeStatistics::record(std::span<const std::int64_t> ages, const ActivationSet& scheduled,
                           const std::vector<bool>& successes) {
  for (std::size_t e = 0; e < acc_.size(); ++e) acc_[e].age_sum += static_cast<std::uint64_t>(ages[e]);
  for (LinkIndex e : scheduled.members) {
    const auto a = static_cast<std::uint64_t>(ages[e]);
    auto& s = acc_[e];
    ++s.activations;
    s.scheduled_age_sum += a;
    s.scheduled_age_sq_sum += a * a;
    if (successes[e]) {
      ++s.successes;
      s.peak_sum += a;
    }
  }
  ++slots_;
}

Checkpoint AgeStatistics::snapshot(std::span<const double> weights) const {
  Checkpoint c;
  c.t = slots_;
  c.per_link_peak.resize(acc_.size());
  c.per_link_avg.resize(acc_.size());
  for (std::size_t e = 0; e < acc_.size(); ++e) {
    c.per_link_peak[e] = ratio(acc_[e].peak_sum, acc_[e].successes);
    c.per_link_avg[e] = ratio(acc_[e].age_sum, slots_);
  }
  c.network_peak = weighted_sum(weights, c.per_link_peak);
  c.network_avg = weighted_sum(weights, c.per_link_avg);
  c.accumulators = acc_;
  return c;
}

void AgeStatistics::finalize(std::span<const double> weights, SimulationResult& result) const {
  auto c = snapshot(weights);
  result.per_link_peak = std::move(c.per_link_peak);
  result.per_link_avg = std::move(c.per_link_avg);
  result.network_peak = c.network_peak;
  result.network_avg = c.network_avg;
  result.horizon = slots_;
  result.accumulators = acc_;
  result.success_counts.resize(acc_.size());
  result.activation_counts.resize(acc_.size());
  for (std::size_t e = 0; e < acc_.size(); ++e) {
    result.success_counts[e] = acc_[e].successes;
    result.activation_counts[e] = acc_[e].activations;
  }
  result.conservation_residual = conservation_check(result);
}

double peak_age_estimate(std::span<const std::int64_t> peaks) {
  if (peaks.empty()) return kInf;
  std::uint64_t total = 0;
  for (auto p : peaks) total += static_cast<std::uint64_t>(p);
  return static_cast<double>(total) / static_cast<double>(peaks.size());
}

double avg_age_estimate(std::span<const std::int64_t> ages) {
  if (ages.empty()) throw std::invalid_argument("avg_age_estimate: empty trajectory");
  std::uint64_t total = 0;
  for (auto a : ages) total += static_cast<std::uint64_t>(a);
  return static_cast<double>(total) / static_cast<double>(ages.size());
}

std::vector<double> conservation_check(const SimulationResult& result) {
  std::vector<double> out(result.accumulators.size());
  const double t = static_cast<double>(result.horizon);
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e] = static_cast<double>(result.accumulators[e].peak_sum) / t - 1.0;
  }
  return out;
}

std::vector<IdentityPair> lemma2_identity_check(const SimulationResult& result, const NetworkSpec& spec,
                                                double beta) {
  return identity_from_sums(result.accumulators, result.horizon, spec, beta);
}

std::vector<IdentityPair> lemma2_identity_check(std::span<const SlotTrace> trace, const AgeVector& initial,
                                                const NetworkSpec& spec, double beta) {
  if (trace.empty()) throw std::invalid_argument("lemma2_identity_check: empty trace");
  AgeStatistics stats(spec.link_count());
  const AgeVector* before = &initial;
  for (const auto& slot : trace) {
    if (slot.ages_after.size() != spec.link_count()) {
      throw std::invalid_argument("lemma2_identity_check: trace lacks age vectors");
    }
    stats.record(*before, slot.scheduled, slot.successes);
    before = &slot.ages_after;
  }
  return identity_from_sums(stats.accumulators(), stats.slots(), spec, beta);
}

std::string bound_name(BoundName name) {
  switch (name) {
    case BoundName::thm2_peak: return "Thm2_peak";
    case BoundName::thm3_peak: return "Thm3_peak";
    case BoundName::thm3_avg: return "Thm3_avg";
    case BoundName::lemma4: return "Lemma4";
    case BoundName::eq12_lower: return "Eq12_lower";
  }
  return "unknown";
}

double age_policy_c1(double beta) { return (10.0 + 2.0 * beta - beta * beta) / 4.0; }
double age_policy_c2(double beta) { return (4.0 + 2.0 * beta - beta * beta) / 2.0; }

std::vector<BoundReport> bound_reports(const SimulationResult& result, const StationarySolution& solution,
                                       const NetworkSpec& spec, std::optional<double> stationary_network_avg) {
  const double sum_w = spec.weight_sum();
  const double peak = result.network_peak;
  const double avg = result.network_avg;
  std::vector<BoundReport> out;

  switch (result.policy.kind) {
    case PolicyKind::virtual_queue: {
      const double rhs = solution.peak_opt + 0.5 * sum_w + sum_w / (2.0 * result.policy.v_param);
      out.push_back(make_report(BoundName::thm2_peak, peak, rhs, peak));
      break;
    }
    case PolicyKind::age_based: {
      const double beta = result.policy.beta;
      out.push_back(make_report(BoundName::thm3_peak, peak, 4.0 * solution.peak_opt - age_policy_c2(beta) * sum_w,
                                peak));
      if (stationary_network_avg) {
        out.push_back(make_report(BoundName::thm3_avg, avg,
                                  4.0 * *stationary_network_avg - age_policy_c1(beta) * sum_w, avg));
      }
      break;
    }
    default: break;
  }
  out.push_back(make_report(BoundName::lemma4, peak, 2.0 * avg - sum_w, peak));
  out.push_back(make_report(BoundName::eq12_lower, average_age_lower_bound(solution.peak_opt, spec), avg, avg));
  return out;
}

}  // namespace agesched
