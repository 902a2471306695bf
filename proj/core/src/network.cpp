#include "agesched/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace agesched {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kSubDistributionSlack = 1e-12;

// Relative tolerance under which two explicit-set sums count as tied.
constexpr double kTieRelTol = 1e-12;

}  // namespace

ActivationSet::ActivationSet(std::vector<LinkIndex> links) : members(std::move(links)) {
  std::sort(members.begin(), members.end());
}

bool ActivationSet::contains(LinkIndex e) const noexcept {
  return std::binary_search(members.begin(), members.end(), e);
}

double NetworkSpec::weight_sum() const noexcept {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<Violation> validate_network(const NetworkSpec& spec) {
  std::vector<Violation> out;
  const std::size_t n = spec.link_count();
  if (n == 0) {
    out.push_back({Violation::Kind::no_links, std::nullopt, std::nullopt, "network has no links"});
    return out;
  }
  if (spec.success_probs.size() != n) {
    std::ostringstream msg;
    msg << "success_probs has " << spec.success_probs.size() << " entries, expected " << n;
    out.push_back({Violation::Kind::size_mismatch, std::nullopt, std::nullopt, msg.str()});
  }
  for (LinkIndex e = 0; e < n; ++e) {
    const double w = spec.weights[e];
    if (!(std::isfinite(w) && w > 0.0)) {
      out.push_back({Violation::Kind::bad_weight, e, std::nullopt,
                     "link " + std::to_string(e) + ": weight must be positive"});
    }
  }
  for (LinkIndex e = 0; e < spec.success_probs.size(); ++e) {
    const double g = spec.success_probs[e];
    if (!(g > 0.0 && g <= 1.0)) {
      out.push_back({Violation::Kind::bad_success_prob, e, std::nullopt,
                     "link " + std::to_string(e) + ": success probability must be positive and at most 1"});
    }
  }

  std::vector<bool> covered(n, false);
  std::visit(overloaded{
                 [&](const KofN& kn) {
                   if (kn.k == 0 || kn.k > n) {
                     out.push_back({Violation::Kind::bad_k, std::nullopt, std::nullopt,
                                    "k must lie in [1, " + std::to_string(n) + "]"});
                     return;
                   }
                   std::fill(covered.begin(), covered.end(), true);
                 },
                 [&](const ExplicitFamily& fam) {
                   if (fam.sets.empty()) {
                     out.push_back({Violation::Kind::empty_family, std::nullopt, std::nullopt,
                                    "explicit activation family is empty"});
                   }
                   for (std::size_t s = 0; s < fam.sets.size(); ++s) {
                     const auto& m = fam.sets[s].members;
                     for (std::size_t i = 0; i < m.size(); ++i) {
                       if (m[i] >= n) {
                         out.push_back({Violation::Kind::bad_link_index, m[i], s,
                                        "set " + std::to_string(s) + ": link index " +
                                            std::to_string(m[i]) + " out of range"});
                         continue;
                       }
                       if (i > 0 && m[i] == m[i - 1]) {
                         out.push_back({Violation::Kind::duplicate_member, m[i], s,
                                        "set " + std::to_string(s) + ": link " +
                                            std::to_string(m[i]) + " listed twice"});
                       }
                       covered[m[i]] = true;
                     }
                   }
                 },
             },
             spec.interference);

  const bool k_ok = std::none_of(out.begin(), out.end(), [](const Violation& v) {
    return v.kind == Violation::Kind::bad_k;
  });
  if (k_ok) {
    for (LinkIndex e = 0; e < n; ++e) {
      if (!covered[e]) {
        out.push_back({Violation::Kind::uncovered_link, e, std::nullopt,
                       "link " + std::to_string(e) + " is not in any feasible activation set"});
      }
    }
  }
  return out;
}

void require_valid(const NetworkSpec& spec) {
  const auto violations = validate_network(spec);
  if (!violations.empty()) throw std::invalid_argument("invalid network: " + violations.front().message);
}

bool is_feasible(const NetworkSpec& spec, const ActivationSet& set) {
  if (set.empty()) return true;
  if (std::adjacent_find(set.members.begin(), set.members.end()) != set.members.end()) return false;
  if (set.members.back() >= spec.link_count()) return false;
  return std::visit(overloaded{
                        [&](const KofN& kn) { return set.size() <= kn.k; },
                        [&](const ExplicitFamily& fam) {
                          return std::find(fam.sets.begin(), fam.sets.end(), set) != fam.sets.end();
                        },
                    },
                    spec.interference);
}

bool singletons_feasible(const NetworkSpec& spec) {
  for (LinkIndex e = 0; e < spec.link_count(); ++e) {
    if (!is_feasible(spec, ActivationSet({e}))) return false;
  }
  return true;
}

void max_weight_set(const NetworkSpec& spec, std::span<const double> values, ActivationSet& out) {
  const std::size_t n = spec.link_count();
  if (values.size() != n) throw std::invalid_argument("max_weight_set: values size does not match link count");
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("max_weight_set: values must be non-negative");
  }

  out.members.clear();
  std::visit(overloaded{
                 [&](const KofN& kn) {
                   auto& idx = out.members;
                   for (LinkIndex e = 0; e < n; ++e) {
                     if (values[e] > 0.0) idx.push_back(e);
                   }
                   auto better = [&](LinkIndex a, LinkIndex b) {
                     return values[a] > values[b] || (values[a] == values[b] && a < b);
                   };
                   if (idx.size() > kn.k) {
                     std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kn.k) - 1,
                                      idx.end(), better);
                     idx.resize(kn.k);
                   }
                   std::sort(idx.begin(), idx.end());
                 },
                 [&](const ExplicitFamily& fam) {
                   const ActivationSet* best = nullptr;  // nullptr is the empty set
                   double best_sum = 0.0;
                   for (const auto& m : fam.sets) {
                     double sum = 0.0;
                     for (LinkIndex e : m.members) sum += values[e];
                     const double tie = kTieRelTol * std::max(1.0, std::abs(best_sum));
                     if (sum > best_sum + tie) {
                       best = &m;
                       best_sum = sum;
                     } else if (sum >= best_sum - tie && best != nullptr && !m.empty() && m < *best) {
                       best = &m;
                       best_sum = std::max(sum, best_sum);
                     }
                   }
                   if (best != nullptr) out.members = best->members;
                 },
             },
             spec.interference);
}

ActivationSet max_weight_set(const NetworkSpec& spec, std::span<const double> values) {
  ActivationSet out;
  max_weight_set(spec, values, out);
  return out;
}

std::vector<double> activation_frequencies(const NetworkSpec& spec,
                                           std::span<const ActivationSet> sets,
                                           std::span<const double> x) {
  if (sets.size() != x.size()) throw std::invalid_argument("activation_frequencies: sets and x differ in length");
  double total = 0.0;
  for (double xm : x) {
    if (!(xm >= 0.0)) throw std::invalid_argument("activation_frequencies: negative probability");
    total += xm;
  }
  if (total > 1.0 + kSubDistributionSlack) {
    throw std::invalid_argument("activation_frequencies: probabilities sum above 1");
  }
  std::vector<double> f(spec.link_count(), 0.0);
  for (std::size_t m = 0; m < sets.size(); ++m) {
    if (!is_feasible(spec, sets[m])) {
      throw std::invalid_argument("activation_frequencies: infeasible set " + to_string(sets[m]));
    }
    for (LinkIndex e : sets[m].members) f[e] += x[m];
  }
  for (double& fe : f) fe = std::min(fe, 1.0);
  return f;
}

std::string to_string(const ActivationSet& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(set.members[i]);
  }
  s += '}';
  return s;
}

}  // namespace agesched
