#include <algorithm>
#include <optional>
#include <cmath>

#include <json.hpp>

#include "agesched/experiment.hpp"
#include "internal.hpp"

namespace agesched {

using nlohmann::json;

namespace {

// Config for one axis value, or nullopt when no policy applies to the axis.
std::optional<ExperimentConfig> config_at(const SweepSpec& sweep, double value) {
  ExperimentConfig cfg = sweep.base;
  switch (sweep.axis) {
    case SweepAxis::theta:
      std::get<TwoClassChannel>(cfg.network.channel).theta = value;
      return cfg;
    case SweepAxis::beta:
    case SweepAxis::v_param: {
      const PolicyKind target = sweep.axis == SweepAxis::beta ? PolicyKind::age_based : PolicyKind::virtual_queue;
      std::vector<PolicyDescriptor> kept;
      for (auto p : cfg.policies) {
        if (p.kind != target) continue;
        if (target == PolicyKind::age_based) {
          p.beta = value;
        } else {
          p.v_param = value;
        }
        if (std::find(kept.begin(), kept.end(), p) == kept.end()) kept.push_back(p);
      }
      if (kept.empty()) return std::nullopt;
      cfg.policies = std::move(kept);
      return cfg;
    }
    case SweepAxis::time: return cfg;
  }
  return std::nullopt;
}

std::string checkpoint_rows(const std::string& hash, const RunRecord& run, const Checkpoint& c, std::size_t n) {
  const std::string lead = hash + "," + std::to_string(run.seed) + "," + std::to_string(c.t) + "," +
                           run.policy.name() + ",";
  std::string out;
  std::uint64_t successes = 0;
  std::uint64_t activations = 0;
  double worst = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const auto& acc = c.accumulators[e];
    const double residual = static_cast<double>(acc.peak_sum) / static_cast<double>(c.t) - 1.0;
    if (std::abs(residual) > std::abs(worst)) worst = residual;
    successes += acc.successes;
    activations += acc.activations;
    out += lead + std::to_string(e) + "," + format_number(c.per_link_peak[e]) + "," +
           format_number(c.per_link_avg[e]) + "," + std::to_string(acc.successes) + "," +
           std::to_string(acc.activations) + "," + format_number(residual) + "\n";
  }
  out += lead + "net," + format_number(c.network_peak) + "," + format_number(c.network_avg) + "," +
         std::to_string(successes) + "," + std::to_string(activations) + "," + format_number(worst) + "\n";
  return out;
}

}  // namespace

SweepResults compute_sweep(const SweepSpec& sweep, unsigned threads) {
  if (sweep.values.empty()) throw ConfigError("sweep.values", "must be non-empty");
  SweepResults out;
  out.config_hash = config_hash(serialize_sweep_spec(sweep));

  if (sweep.axis == SweepAxis::time) {
    std::vector<std::uint64_t> checkpoints;
    for (double v : sweep.values) {
      if (v < 1.0 || v > static_cast<double>(sweep.base.horizon)) {
        throw ConfigError("sweep.values", "checkpoints must lie in [1, horizon]");
      }
      checkpoints.push_back(static_cast<std::uint64_t>(v));
    }
    out.points.push_back({static_cast<double>(sweep.base.horizon),
                          detail::compute_point(sweep.base, checkpoints, threads)});
  } else {
    for (double value : sweep.values) {
      const auto cfg = config_at(sweep, value);
      if (!cfg) {
        throw ConfigError("policies[]", "no policy is affected by a " + axis_name(sweep.axis) + " sweep");
      }
      out.points.push_back({value, detail::compute_point(*cfg, {}, threads)});
    }
  }

  for (auto& point : out.points) {
    for (auto& run : point.results.runs) {
      run.axis_value = format_number(point.axis_value);
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_sweep(const SweepSpec& sweep, const SweepResults& results,
                                               const std::filesystem::path& prefix) {
  using detail::with_suffix;
  using detail::write_file;

  std::string rows(kRunCsvHeader);
  rows += '\n';
  std::string bounds(kBoundCsvHeader);
  bounds += '\n';
  std::string solutions = "axis_value,peak_opt,lower_bound,gap,sum_w,n\n";

  for (const auto& point : results.points) {
    const auto& net = point.results.network;
    for (const auto& run : point.results.runs) {
      if (sweep.axis == SweepAxis::time) {
        for (const auto& c : run.result.checkpoints) rows += checkpoint_rows(results.config_hash, run, c, net.link_count());
      } else {
        rows += format_run_rows(results.config_hash, run, net);
      }
      bounds += detail::format_bound_rows(results.config_hash, run);
    }
    solutions += format_number(point.axis_value) + "," + format_number(point.results.solution.peak_opt) + "," +
                 format_number(point.results.lower_bound) + "," + format_number(point.results.solution.gap) + "," +
                 format_number(net.weight_sum()) + "," + std::to_string(net.link_count()) + "\n";
  }

  std::vector<std::filesystem::path> written;
  written.push_back(with_suffix(prefix, "_sweep.csv"));
  write_file(written.back(), rows);
  written.push_back(with_suffix(prefix, "_sweep_bounds.csv"));
  write_file(written.back(), bounds);
  written.push_back(with_suffix(prefix, "_solutions.csv"));
  write_file(written.back(), solutions);

  json meta{{"kind", "sweep"},
            {"axis", axis_name(sweep.axis)},
            {"values", sweep.values},
            {"config", json::parse(serialize_sweep_spec(sweep))},
            {"config_hash", results.config_hash},
            {"n", sweep.base.network.n},
            {"horizon", sweep.base.horizon}};
  if (const auto* kn = std::get_if<KofN>(&sweep.base.network.interference)) meta["k"] = kn->k;
  written.push_back(with_suffix(prefix, "_meta.json"));
  write_file(written.back(), meta.dump(2) + "\n");
  return written;
}

std::vector<std::filesystem::path> run_sweep(const SweepSpec& sweep, unsigned threads) {
  const auto results = compute_sweep(sweep, threads);
  return write_sweep(sweep, results, sweep.base.output);
}

}  // namespace agesched
