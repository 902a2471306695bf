#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agesched/metrics.hpp"
#include "agesched/network.hpp"
#include "agesched/policy.hpp"
#include "agesched/stationary.hpp"
#include "agesched/trace.hpp"

namespace agesched {

// Error types map one-to-one onto the CLI exit codes.

/// Schema or validation failure; `field()` is a path such as
/// "network.channel.theta" or "policies[]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BadLinkAssignment { first, seeded_random };

/// Good/bad channel classes: ceil(theta * n) links get `bad`, the rest `good`.
struct TwoClassChannel {
  double good = 0.9;
  double bad = 0.1;
  double theta = 0.0;
  BadLinkAssignment assignment = BadLinkAssignment::first;
  std::uint64_t assignment_seed = 0;
};

struct PerLinkChannel {
  std::vector<double> probs;
};

struct NetworkConfig {
  std::size_t n = 0;
  InterferenceSpec interference = KofN{1};
  std::variant<double, std::vector<double>> weights = 1.0;
  std::variant<TwoClassChannel, PerLinkChannel> channel = TwoClassChannel{};
};

struct ExperimentConfig {
  NetworkConfig network;
  std::vector<PolicyDescriptor> policies;
  std::uint64_t horizon = 100000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t warmup = 0;
  std::string output = "results/experiment";
  TraceLevel trace_level = TraceLevel::none;
  SolverOptions solver;
};

enum class SweepAxis { theta, beta, v_param, time };

/// One figure's worth of runs.
///  - theta: channel theta takes each value; every policy runs.
///  - beta: each age-based entry takes each value; other kinds are skipped.
///  - V: each virtual-queue entry takes each value; other kinds are skipped.
///  - time: values are checkpoints (slot counts <= horizon); every policy runs
///    once and running estimates are reported at each checkpoint.
struct SweepSpec {
  SweepAxis axis = SweepAxis::theta;
  std::vector<double> values;
  ExperimentConfig base;
};

std::string axis_name(SweepAxis axis);

ExperimentConfig parse_experiment_config(std::string_view json_text);
/// Canonical JSON: every field present, keys sorted.
std::string serialize_experiment_config(const ExperimentConfig& config);

/// A sweep document is an experiment document plus a top-level
/// "sweep": {"axis": ..., "values": [...]} member.
SweepSpec parse_sweep_spec(std::string_view json_text);
std::string serialize_sweep_spec(const SweepSpec& sweep);

/// Stable 64-bit FNV-1a of the canonical text, as 16 lowercase hex digits.
std::string config_hash(std::string_view canonical_text);

NetworkSpec build_network(const NetworkConfig& config);

/// Throws ConfigError on the first schema violation.
void validate_config(const ExperimentConfig& config);

struct RunRecord {
  std::string axis_value;  // empty for single experiments
  PolicyDescriptor policy;
  std::uint64_t seed = 0;
  SimulationResult result;
  std::vector<BoundReport> bounds;
};

struct ExperimentResults {
  std::string config_hash;
  NetworkSpec network;
  StationarySolution solution;
  double lower_bound = 0.0;
  std::vector<RunRecord> runs;  // canonical order: policy index, then seed index
};

/// Solves the stationary program, then runs every (policy, seed) pair.
/// Throws SolverError when the solver does not converge.
ExperimentResults compute_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// Writes <prefix>_runs.csv, <prefix>_bounds.csv, <prefix>_solution.json,
/// <prefix>_meta.json and, at TraceLevel::full/aggregates, one trace CSV per
/// run. Returns the written paths.
std::vector<std::filesystem::path> write_experiment(const ExperimentConfig& config,
                                                    const ExperimentResults& results,
                                                    const std::filesystem::path& prefix);

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, unsigned threads = 0);

struct SweepPoint {
  double axis_value = 0.0;
  ExperimentResults results;
};

struct SweepResults {
  std::string config_hash;
  std::vector<SweepPoint> points;
};

SweepResults compute_sweep(const SweepSpec& sweep, unsigned threads = 0);

/// Writes <prefix>_sweep.csv (long format), <prefix>_sweep_bounds.csv,
/// <prefix>_solutions.csv and <prefix>_meta.json.
std::vector<std::filesystem::path> write_sweep(const SweepSpec& sweep, const SweepResults& results,
                                               const std::filesystem::path& prefix);

std::vector<std::filesystem::path> run_sweep(const SweepSpec& sweep, unsigned threads = 0);

/// Header shared by every run table.
inline constexpr std::string_view kRunCsvHeader =
    "config_hash,seed,axis_value,policy,link,peak,avg,successes,activations,conservation_residual";
inline constexpr std::string_view kBoundCsvHeader =
    "config_hash,seed,axis_value,policy,bound_name,lhs,rhs,slack,satisfied";
inline constexpr std::string_view kTraceCsvHeader = "t,scheduled,successes";
inline constexpr std::string_view kPlotCsvHeader = "x,series,y,y_stderr";

/// Rows for one run: one per link, then the "net" row.
std::string format_run_rows(const std::string& hash, const RunRecord& run, const NetworkSpec& spec);
std::string format_trace_csv(const std::vector<SlotTrace>& trace, std::size_t link_count);
std::string format_number(double value);

struct FigureStatus {
  std::string figure;
  std::filesystem::path path;
  bool written = false;
  std::string message;
};

/// Scans `results_dir` for sweep outputs and writes fig2..fig5 tables into
/// `out_dir`. Figures whose inputs are absent are reported, not written.
std::vector<FigureStatus> emit_plot_data(const std::filesystem::path& results_dir,
                                         const std::filesystem::path& out_dir);

}  // namespace agesched
