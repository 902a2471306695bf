#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace agesched {

using LinkIndex = std::size_t;

/// A set of links that may be activated in the same slot. Members are kept
/// sorted, so the defaulted ordering is the lexicographic order on the
/// sorted member list.
struct ActivationSet {
  std::vector<LinkIndex> members;

  ActivationSet() = default;
  explicit ActivationSet(std::vector<LinkIndex> links);

  bool empty() const noexcept { return members.empty(); }
  std::size_t size() const noexcept { return members.size(); }
  bool contains(LinkIndex e) const noexcept;

  friend bool operator==(const ActivationSet&, const ActivationSet&) = default;
  friend auto operator<=>(const ActivationSet&, const ActivationSet&) = default;
};

/// Every subset of at most `k` links is feasible.
struct KofN {
  std::size_t k = 1;
};

/// Exactly the listed sets (plus the empty set) are feasible.
struct ExplicitFamily {
  std::vector<ActivationSet> sets;
};

using InterferenceSpec = std::variant<KofN, ExplicitFamily>;

struct NetworkSpec {
  std::vector<double> weights;
  std::vector<double> success_probs;
  InterferenceSpec interference;

  std::size_t link_count() const noexcept { return weights.size(); }
  double weight_sum() const noexcept;
};

struct Violation {
  enum class Kind {
    no_links,
    size_mismatch,
    bad_weight,
    bad_success_prob,
    bad_k,
    empty_family,
    bad_link_index,
    duplicate_member,
    uncovered_link,
  };
  Kind kind;
  std::optional<LinkIndex> link;
  std::optional<std::size_t> set;
  std::string message;
};

std::vector<Violation> validate_network(const NetworkSpec& spec);

/// Throws std::invalid_argument carrying the first violation, if any.
void require_valid(const NetworkSpec& spec);

bool is_feasible(const NetworkSpec& spec, const ActivationSet& set);

/// True when every single-link set is feasible.
bool singletons_feasible(const NetworkSpec& spec);

/// Feasible set maximizing the sum of `values` over its members. Ties go to
/// the lexicographically smallest member list; links whose value is zero are
/// never added to a KofN answer.
ActivationSet max_weight_set(const NetworkSpec& spec, std::span<const double> values);

/// Same as above but reuses `out` to avoid per-call allocation in the
/// simulation loop.
void max_weight_set(const NetworkSpec& spec, std::span<const double> values, ActivationSet& out);

/// f_e = sum of x_m over the listed sets m that contain e.
std::vector<double> activation_frequencies(const NetworkSpec& spec,
                                           std::span<const ActivationSet> sets,
                                           std::span<const double> x);

std::string to_string(const ActivationSet& set);

}  // namespace agesched
