#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agesched/network.hpp"
#include "agesched/policy.hpp"

namespace agesched {

/// Peak-age optimal randomized schedule over a network's activation family.
struct StationarySolution {
  std::vector<ActivationSet> support;
  std::vector<double> probs;
  std::vector<double> freqs;  // per-link activation frequency induced by (support, probs)
  double peak_opt = 0.0;      // sum_e w_e / (gamma_e f_e)
  double gap = 0.0;           // Frank-Wolfe duality gap at termination
  std::size_t iterations = 0;
  bool converged = false;

  StationaryState policy() const { return StationaryState{support, probs}; }
};

struct SolverOptions {
  double tol = 1e-9;
  std::size_t max_iter = 100000;
};

/// sum_e w_e / (gamma_e f_e); +infinity as soon as some f_e <= 0.
double eval_peak_objective(const NetworkSpec& spec, std::span<const double> f);

/// Minimizes the network peak age over all stationary schedules.
///
/// Runs pairwise Frank-Wolfe on the polytope spanned by the feasible
/// activation sets. The linear minimization oracle is `max_weight_set` with
/// per-link values w_e / (gamma_e f_e^2), so KofN families are never
/// enumerated. Iterates start from a uniform mixture of a greedy cover. The
/// exact line search bisects on the segment derivative to 1e-12 and never
/// lets any f_e fall below 1e-12.
///
/// Explicit families keep an active-set decomposition over the listed sets.
/// KofN iterates live in frequency coordinates, where a pairwise step between
/// two k-sets differing in one link moves mass between two frequencies; the
/// final frequencies are turned into a small support with
/// `stationary_support_kofn`.
///
/// Stops once the duality gap is at most `tol`; otherwise returns the last
/// iterate with `converged == false`.
StationarySolution solve_stationary(const NetworkSpec& spec, const SolverOptions& options = {});

/// Closed-form KKT solution for KofN: f_e = min(1, sqrt(w_e / gamma_e) / nu)
/// with nu set so that sum f_e = k.
std::vector<double> waterfill_kofn(std::span<const double> weights, std::span<const double> success_probs,
                                   std::size_t k);

/// Greedy decomposition of frequencies f (sum f <= k, f <= 1) into at most
/// |E| + 1 sets of size <= k whose mixture reproduces f.
StationaryState stationary_support_kofn(std::span<const double> f, std::size_t k);

/// (peak_opt + sum_e w_e) / 2, a lower bound on the optimal average age.
double average_age_lower_bound(double peak_opt, const NetworkSpec& spec);

}  // namespace agesched
