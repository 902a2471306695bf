// Independent reference implementations used only by tests. Nothing here
// calls into the library's optimizers or argmax.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "agesched/network.hpp"

namespace agesched::testing {

/// Every feasible activation set, including the empty set. KofN families are
/// enumerated by bitmask, so keep n small.
inline std::vector<ActivationSet> enumerate_feasible(const NetworkSpec& spec) {
  std::vector<ActivationSet> out;
  out.emplace_back();
  if (const auto* kn = std::get_if<KofN>(&spec.interference)) {
    const std::size_t n = spec.link_count();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<LinkIndex> members;
      for (std::size_t e = 0; e < n; ++e) {
        if (mask >> e & 1U) members.push_back(e);
      }
      if (members.size() <= kn->k) out.emplace_back(std::move(members));
    }
  } else {
    for (const auto& m : std::get<ExplicitFamily>(spec.interference).sets) out.push_back(m);
  }
  return out;
}

inline double set_value(const ActivationSet& m, const std::vector<double>& values) {
  double total = 0.0;
  for (LinkIndex e : m.members) total += values[e];
  return total;
}

/// Brute-force maximum of the set value over the feasible family.
inline double brute_force_max(const NetworkSpec& spec, const std::vector<double>& values) {
  double best = 0.0;
  for (const auto& m : enumerate_feasible(spec)) best = std::max(best, set_value(m, values));
  return best;
}

/// sum_e w_e / (gamma_e f_e), written out independently of the library.
inline double peak_objective(const std::vector<double>& w, const std::vector<double>& gamma,
                             const std::vector<double>& f) {
  double total = 0.0;
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (f[e] <= 0.0) return std::numeric_limits<double>::infinity();
    total += w[e] / (gamma[e] * f[e]);
  }
  return total;
}

/// Dense grid search over distributions on an explicit family of at most
/// three sets (probabilities on a `step` lattice, summing to at most 1).
inline double grid_search_explicit(const std::vector<ActivationSet>& sets, const std::vector<double>& w,
                                   const std::vector<double>& gamma, double step) {
  const std::size_t n = w.size();
  const auto steps = static_cast<int>(std::lround(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double>& x) {
    std::vector<double> f(n, 0.0);
    for (std::size_t m = 0; m < sets.size(); ++m) {
      for (LinkIndex e : sets[m].members) f[e] += x[m];
    }
    best = std::min(best, peak_objective(w, gamma, f));
  };
  if (sets.size() == 1) {
    eval({1.0});
  } else if (sets.size() == 2) {
    for (int i = 0; i <= steps; ++i) eval({i * step, 1.0 - i * step});
  } else {
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; i + j <= steps; ++j) eval({i * step, j * step, 1.0 - (i + j) * step});
    }
  }
  return best;
}

/// Frequencies on a grid for a KofN instance with n <= 3: exhaustive search
/// over f in (0,1]^n with sum f <= k.
inline double grid_search_kofn(const std::vector<double>& w, const std::vector<double>& gamma, std::size_t k,
                               double step) {
  const std::size_t n = w.size();
  const auto steps = static_cast<int>(std::lround(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> f(n);
  std::function<void(std::size_t, double)> rec = [&](std::size_t e, double used) {
    if (e == n) {
      best = std::min(best, peak_objective(w, gamma, f));
      return;
    }
    for (int i = 1; i <= steps; ++i) {
      const double v = i * step;
      if (used + v > static_cast<double>(k) + 1e-12) break;
      f[e] = v;
      rec(e + 1, used + v);
    }
  };
  rec(0, 0.0);
  return best;
}

/// Deterministic generator for property-test inputs.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace agesched::testing
