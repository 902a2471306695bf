#include "agesched/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace agesched {

namespace {

constexpr double kMinFrequency = 1e-12;
constexpr int kLineSearchRounds = 200;
constexpr double kDecompositionEps = 1e-13;
constexpr std::size_t kResyncEvery = 256;

// Greedy cover: repeatedly take the feasible set covering the most uncovered links.
std::vector<ActivationSet> greedy_cover(const NetworkSpec& spec) {
  const std::size_t n = spec.link_count();
  std::vector<bool> covered(n, false);
  std::size_t remaining = n;
  std::vector<ActivationSet> cover;

  if (const auto* kn = std::get_if<KofN>(&spec.interference)) {
    for (LinkIndex first = 0; first < n; first += kn->k) {
      std::vector<LinkIndex> members;
      for (LinkIndex e = first; e < std::min(n, first + kn->k); ++e) members.push_back(e);
      cover.emplace_back(std::move(members));
    }
    return cover;
  }

  const auto& sets = std::get<ExplicitFamily>(spec.interference).sets;
  while (remaining > 0) {
    const ActivationSet* best = nullptr;
    std::size_t best_gain = 0;
    for (const auto& m : sets) {
      std::size_t gain = 0;
      for (LinkIndex e : m.members) gain += covered[e] ? 0 : 1;
      if (gain > best_gain || (gain == best_gain && gain > 0 && m < *best)) {
        best = &m;
        best_gain = gain;
      }
    }
    if (best == nullptr) throw std::invalid_argument("solve_stationary: some link is not coverable");
    for (LinkIndex e : best->members) {
      if (!covered[e]) {
        covered[e] = true;
        --remaining;
      }
    }
    cover.push_back(*best);
  }
  return cover;
}

double link_cost(const NetworkSpec& spec, LinkIndex e, double fe) {
  return spec.weights[e] / (spec.success_probs[e] * fe);
}

// Active-set representation of the current iterate.
class ActiveSet {
 public:
  explicit ActiveSet(std::size_t n) : f_(n, 0.0) {}

  void add(const ActivationSet& v, double amount) {
    auto [it, inserted] = index_.try_emplace(v, weights_.size());
    if (inserted) {
      vertices_.push_back(v);
      weights_.push_back(0.0);
    }
    weights_[it->second] += amount;
    for (LinkIndex e : v.members) f_[e] += amount;
  }

  void remove_mass(std::size_t idx, double amount, bool drop) {
    for (LinkIndex e : vertices_[idx].members) f_[e] -= amount;
    weights_[idx] = drop ? 0.0 : weights_[idx] - amount;
  }

  void prune() {
    std::vector<ActivationSet> v;
    std::vector<double> w;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (weights_[i] > 0.0) {
        v.push_back(std::move(vertices_[i]));
        w.push_back(weights_[i]);
      }
    }
    vertices_ = std::move(v);
    weights_ = std::move(w);
    index_.clear();
    for (std::size_t i = 0; i < vertices_.size(); ++i) index_.emplace(vertices_[i], i);
  }

  void resync() {
    std::fill(f_.begin(), f_.end(), 0.0);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      for (LinkIndex e : vertices_[i].members) f_[e] += weights_[i];
    }
  }

  const std::vector<double>& f() const noexcept { return f_; }
  const std::vector<ActivationSet>& vertices() const noexcept { return vertices_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<ActivationSet> vertices_;
  std::vector<double> weights_;
  std::map<ActivationSet, std::size_t> index_;
  std::vector<double> f_;
};

// Exact line search for a convex segment objective on [lo, hi], given its
// derivative. Bisects on the sign of the derivative down to double
// resolution: comparing objective values instead would only locate the
// minimizer to about sqrt(machine eps), and a 1e-12 step error already moves
// steep gradients by ~1e-9.
template <class D>
double line_search(D&& dphi, double lo, double hi) {
  if (dphi(lo) >= 0.0) return lo;
  if (dphi(hi) <= 0.0) return hi;
  for (int i = 0; i < kLineSearchRounds; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dphi(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// d/df of w_e / (gamma_e f).
double link_cost_slope(const NetworkSpec& spec, LinkIndex e, double fe) {
  return -spec.weights[e] / (spec.success_probs[e] * fe * fe);
}

// Pairwise Frank-Wolfe for KofN in frequency coordinates. The polytope is
// {f in [0,1]^E : sum f <= k}; two k-sets differing in one swapped link give
// the direction e_i - e_j, and idle mass gives e_i alone. Returns the final
// duality gap and fills `f` and `iterations`.
double solve_kofn_frequencies(const NetworkSpec& spec, std::size_t k, const SolverOptions& options,
                              std::vector<double>& f, std::size_t& iterations) {
  const std::size_t n = spec.link_count();
  std::vector<double> grad(n);
  ActivationSet fw_vertex;
  double gap = std::numeric_limits<double>::infinity();
  const double budget = static_cast<double>(k);

  std::size_t iter = 0;
  for (; iter < options.max_iter; ++iter) {
    for (LinkIndex e = 0; e < n; ++e) grad[e] = spec.weights[e] / (spec.success_probs[e] * f[e] * f[e]);
    max_weight_set(spec, grad, fw_vertex);
    double fw_value = 0.0;
    for (LinkIndex e : fw_vertex.members) fw_value += grad[e];
    gap = fw_value - std::inner_product(grad.begin(), grad.end(), f.begin(), 0.0);
    if (gap <= options.tol) break;

    // Gaining link: steepest one not yet at frequency 1.
    LinkIndex gain = n;
    for (LinkIndex e = 0; e < n; ++e) {
      if (f[e] < 1.0 && (gain == n || grad[e] > grad[gain])) gain = e;
    }
    if (gain == n) break;

    const double slack = budget - std::accumulate(f.begin(), f.end(), 0.0);
    if (slack > 0.0) {
      // The objective decreases in every f_e, so the full step is exact.
      f[gain] = std::min(1.0, f[gain] + slack);
      continue;
    }

    LinkIndex lose = n;
    for (LinkIndex e = 0; e < n; ++e) {
      if (e != gain && f[e] > kMinFrequency && (lose == n || grad[e] < grad[lose])) lose = e;
    }
    if (lose == n || grad[lose] >= grad[gain]) break;

    const double step_max = std::max(0.0, std::min(1.0 - f[gain], f[lose] - kMinFrequency));
    auto dphi = [&](double eta) {
      return link_cost_slope(spec, gain, f[gain] + eta) - link_cost_slope(spec, lose, f[lose] - eta);
    };
    const double eta = line_search(dphi, 0.0, step_max);
    if (eta <= 0.0) break;
    f[gain] += eta;
    f[lose] -= eta;
  }
  iterations = iter;
  return gap;
}

}  // namespace

double eval_peak_objective(const NetworkSpec& spec, std::span<const double> f) {
  if (f.size() != spec.link_count()) throw std::invalid_argument("eval_peak_objective: size mismatch");
  double total = 0.0;
  for (LinkIndex e = 0; e < f.size(); ++e) {
    if (!(f[e] > 0.0)) return std::numeric_limits<double>::infinity();
    total += link_cost(spec, e, f[e]);
  }
  return total;
}

namespace {

// Recomputes freqs, objective and gap at the reported point rather than the
// last iterate.
StationarySolution certify(const NetworkSpec& spec, StationarySolution sol) {
  const std::size_t n = spec.link_count();
  sol.freqs = activation_frequencies(spec, sol.support, sol.probs);
  sol.peak_opt = eval_peak_objective(spec, sol.freqs);
  std::vector<double> grad(n);
  for (LinkIndex e = 0; e < n; ++e) {
    grad[e] = spec.weights[e] / (spec.success_probs[e] * sol.freqs[e] * sol.freqs[e]);
  }
  ActivationSet fw_vertex;
  max_weight_set(spec, grad, fw_vertex);
  double fw_value = 0.0;
  for (LinkIndex e : fw_vertex.members) fw_value += grad[e];
  sol.gap = std::max(0.0, fw_value - std::inner_product(grad.begin(), grad.end(), sol.freqs.begin(), 0.0));
  return sol;
}

}  // namespace

StationarySolution solve_stationary(const NetworkSpec& spec, const SolverOptions& options) {
  require_valid(spec);
  const std::size_t n = spec.link_count();

  const auto cover = greedy_cover(spec);
  StationarySolution sol;

  if (const auto* kn = std::get_if<KofN>(&spec.interference)) {
    std::vector<double> f(n, 0.0);
    for (const auto& m : cover) {
      for (LinkIndex e : m.members) f[e] += 1.0 / static_cast<double>(cover.size());
    }
    const double gap = solve_kofn_frequencies(spec, kn->k, options, f, sol.iterations);
    sol.converged = gap <= options.tol;
    for (double& fe : f) fe = std::clamp(fe, kMinFrequency, 1.0);
    const double total = std::accumulate(f.begin(), f.end(), 0.0);
    if (total > static_cast<double>(kn->k)) {
      for (double& fe : f) fe *= static_cast<double>(kn->k) / total;
    }
    auto support = stationary_support_kofn(f, kn->k);
    sol.support = std::move(support.sets);
    sol.probs = std::move(support.probs);
    return certify(spec, std::move(sol));
  }

  ActiveSet active(n);
  for (const auto& m : cover) active.add(m, 1.0 / static_cast<double>(cover.size()));

  std::vector<double> grad(n);  // negative gradient: w_e / (gamma_e f_e^2)
  ActivationSet fw_vertex;
  double gap = std::numeric_limits<double>::infinity();

  std::size_t iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (iter > 0 && iter % kResyncEvery == 0) active.resync();
    const auto& f = active.f();
    for (LinkIndex e = 0; e < n; ++e) grad[e] = spec.weights[e] / (spec.success_probs[e] * f[e] * f[e]);

    max_weight_set(spec, grad, fw_vertex);
    double fw_value = 0.0;
    for (LinkIndex e : fw_vertex.members) fw_value += grad[e];
    const double current_value = std::inner_product(grad.begin(), grad.end(), f.begin(), 0.0);
    gap = fw_value - current_value;
    if (gap <= options.tol) break;

    // Away vertex: the active vertex with the smallest linear value.
    const auto& verts = active.vertices();
    const auto& wts = active.weights();
    std::size_t away = verts.size();
    double away_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (wts[i] <= 0.0) continue;
      double value = 0.0;
      for (LinkIndex e : verts[i].members) value += grad[e];
      if (value < away_value) {
        away_value = value;
        away = i;
      }
    }
    if (away == verts.size() || verts[away] == fw_vertex) break;

    const ActivationSet& away_set = verts[away];
    std::vector<LinkIndex> gaining;
    std::vector<LinkIndex> losing;
    std::set_difference(fw_vertex.members.begin(), fw_vertex.members.end(), away_set.members.begin(),
                        away_set.members.end(), std::back_inserter(gaining));
    std::set_difference(away_set.members.begin(), away_set.members.end(), fw_vertex.members.begin(),
                        fw_vertex.members.end(), std::back_inserter(losing));

    double step_max = wts[away];
    for (LinkIndex e : losing) step_max = std::min(step_max, f[e] - kMinFrequency);
    step_max = std::max(step_max, 0.0);

    auto dphi = [&](double eta) {
      double total = 0.0;
      for (LinkIndex e : gaining) total += link_cost_slope(spec, e, f[e] + eta);
      for (LinkIndex e : losing) total -= link_cost_slope(spec, e, f[e] - eta);
      return total;
    };
    const double eta = line_search(dphi, 0.0, step_max);
    if (eta <= 0.0) break;

    const bool drop = eta >= wts[away];
    active.remove_mass(away, eta, drop);
    active.add(fw_vertex, eta);
    if (drop) active.prune();
  }
  active.prune();

  sol.iterations = iter;
  sol.converged = gap <= options.tol;

  {
    std::vector<std::size_t> order(active.vertices().size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return active.vertices()[a] < active.vertices()[b]; });
    for (std::size_t i : order) {
      sol.support.push_back(active.vertices()[i]);
      sol.probs.push_back(active.weights()[i]);
    }
    const double total = std::accumulate(sol.probs.begin(), sol.probs.end(), 0.0);
    if (total > 1.0) {
      for (double& p : sol.probs) p /= total;
    }
  }

  return certify(spec, std::move(sol));
}

std::vector<double> waterfill_kofn(std::span<const double> weights, std::span<const double> success_probs,
                                   std::size_t k) {
  const std::size_t n = weights.size();
  if (success_probs.size() != n) throw std::invalid_argument("waterfill_kofn: size mismatch");
  if (k == 0 || k > n) throw std::invalid_argument("waterfill_kofn: k must lie in [1, n]");

  std::vector<double> level(n);
  for (std::size_t e = 0; e < n; ++e) level[e] = std::sqrt(weights[e] / success_probs[e]);

  std::vector<double> f(n, 0.0);
  std::vector<bool> pinned(n, false);
  std::size_t pinned_count = 0;
  while (true) {
    const double budget = static_cast<double>(k - pinned_count);
    if (budget <= 0.0) break;
    double free_level = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      if (!pinned[e]) free_level += level[e];
    }
    if (free_level <= 0.0) break;
    const double nu = free_level / budget;
    bool newly_pinned = false;
    for (std::size_t e = 0; e < n; ++e) {
      if (pinned[e]) continue;
      f[e] = level[e] / nu;
      if (f[e] > 1.0) {
        pinned[e] = true;
        ++pinned_count;
        newly_pinned = true;
      }
    }
    if (!newly_pinned) break;
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (pinned[e]) f[e] = 1.0;
  }
  return f;
}

StationaryState stationary_support_kofn(std::span<const double> f, std::size_t k) {
  const std::size_t n = f.size();
  if (k == 0) throw std::invalid_argument("stationary_support_kofn: k must be positive");
  double total = 0.0;
  for (double fe : f) {
    if (!(fe >= 0.0 && fe <= 1.0 + kDecompositionEps)) {
      throw std::invalid_argument("stationary_support_kofn: frequencies must lie in [0, 1]");
    }
    total += fe;
  }
  if (total > static_cast<double>(k) + 1e-9) {
    throw std::invalid_argument("stationary_support_kofn: frequencies sum above k");
  }

  std::vector<double> residual(f.begin(), f.end());
  for (double& r : residual) r = std::min(r, 1.0);
  double mass = 1.0;
  StationaryState out;
  std::vector<LinkIndex> order;

  for (std::size_t round = 0; round < 2 * n + 2; ++round) {
    order.clear();
    for (LinkIndex e = 0; e < n; ++e) {
      if (residual[e] > kDecompositionEps) order.push_back(e);
    }
    if (order.empty() || mass <= kDecompositionEps) break;
    std::sort(order.begin(), order.end(), [&](LinkIndex a, LinkIndex b) {
      return residual[a] > residual[b] || (residual[a] == residual[b] && a < b);
    });
    const std::size_t take = std::min(k, order.size());

    double step = mass;
    double residual_sum = 0.0;
    for (LinkIndex e = 0; e < n; ++e) residual_sum += residual[e];
    for (std::size_t i = 0; i < order.size(); ++i) {
      const LinkIndex e = order[i];
      step = std::min(step, i < take ? residual[e] : mass - residual[e]);
    }
    if (take < k) {
      step = std::min(step, (static_cast<double>(k) * mass - residual_sum) / static_cast<double>(k - take));
    }
    if (!(step > kDecompositionEps)) break;

    std::vector<LinkIndex> members(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    for (LinkIndex e : members) residual[e] -= step;
    mass -= step;
    for (double& r : residual) {
      if (r < kDecompositionEps) r = 0.0;
      if (std::abs(r - mass) < kDecompositionEps) r = mass;
    }
    out.sets.emplace_back(std::move(members));
    out.probs.push_back(step);
  }
  return out;
}

double average_age_lower_bound(double peak_opt, const NetworkSpec& spec) {
  return 0.5 * (peak_opt + spec.weight_sum());
}

}  // namespace agesched
