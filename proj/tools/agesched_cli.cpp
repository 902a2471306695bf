// agesched: validate, solve, simulate and sweep age-of-information schedules.
//
// Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agesched/experiment.hpp"
#include "agesched/stationary.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kSolver = 2;
constexpr int kIo = 3;

struct Overrides {
  std::string out;
  std::string seeds;
  std::uint64_t horizon = 0;
  unsigned threads = 0;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos) {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw agesched::ConfigError("--seeds", "empty range " + item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      } else {
        seeds.push_back(std::stoull(item));
      }
    } catch (const std::logic_error&) {
      throw agesched::ConfigError("--seeds", "cannot parse '" + item + "'");
    }
  }
  if (seeds.empty()) throw agesched::ConfigError("--seeds", "no seeds given");
  return seeds;
}

void apply(const Overrides& o, agesched::ExperimentConfig& cfg) {
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.seeds.empty()) cfg.seeds = parse_seed_list(o.seeds);
  if (o.horizon > 0) cfg.horizon = o.horizon;
  agesched::validate_config(cfg);
}

std::string load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw agesched::IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_written(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

int cmd_validate(const std::string& config_path, bool sweep) {
  const auto text = load(config_path);
  if (sweep) {
    (void)agesched::parse_sweep_spec(text);
  } else {
    (void)agesched::parse_experiment_config(text);
  }
  std::cout << "ok\n";
  return kOk;
}

int cmd_solve(const std::string& config_path, const Overrides& o) {
  auto cfg = agesched::parse_experiment_config(load(config_path));
  apply(o, cfg);
  const auto spec = agesched::build_network(cfg.network);
  const auto sol = agesched::solve_stationary(spec, cfg.solver);
  std::cout << "peak_opt " << agesched::format_number(sol.peak_opt) << "\n"
            << "peak_opt_per_link " << agesched::format_number(sol.peak_opt / static_cast<double>(spec.link_count()))
            << "\n"
            << "avg_lower_bound " << agesched::format_number(agesched::average_age_lower_bound(sol.peak_opt, spec))
            << "\n"
            << "gap " << agesched::format_number(sol.gap) << "\n"
            << "iterations " << sol.iterations << "\n"
            << "support_size " << sol.support.size() << "\n";
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    std::cout << "  " << agesched::to_string(sol.support[i]) << " " << agesched::format_number(sol.probs[i]) << "\n";
  }
  if (!sol.converged) {
    std::cerr << "error: solver did not converge\n";
    return kSolver;
  }
  return kOk;
}

int cmd_simulate(const std::string& config_path, const Overrides& o) {
  auto cfg = agesched::parse_experiment_config(load(config_path));
  apply(o, cfg);
  const auto results = agesched::compute_experiment(cfg, o.threads);
  print_written(agesched::write_experiment(cfg, results, cfg.output));
  const double n = static_cast<double>(results.network.link_count());
  std::cout << "peak_opt per link " << agesched::format_number(results.solution.peak_opt / n) << ", avg lower bound per link "
            << agesched::format_number(results.lower_bound / n) << "\n";
  for (const auto& run : results.runs) {
    std::cout << run.policy.name() << " seed " << run.seed << ": peak/link "
              << agesched::format_number(run.result.network_peak / n) << ", avg/link "
              << agesched::format_number(run.result.network_avg / n) << "\n";
  }
  return kOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& o) {
  auto sweep = agesched::parse_sweep_spec(load(config_path));
  apply(o, sweep.base);
  print_written(agesched::run_sweep(sweep, o.threads));
  return kOk;
}

int cmd_plotdata(const std::string& results_dir, const std::string& out_dir) {
  const auto status = agesched::emit_plot_data(results_dir, out_dir.empty() ? results_dir : out_dir);
  bool any = false;
  for (const auto& s : status) {
    std::cout << s.figure << ": " << (s.written ? s.path.string() + " (" + s.message + ")" : s.message) << "\n";
    any = any || s.written;
  }
  return any ? kOk : kIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling simulator"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  bool validate_sweep = false;
  std::string results_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", overrides.out, "Output path prefix");
    sub->add_option("--seeds", overrides.seeds, "Seed list, e.g. 1,2,3 or 1-10");
    sub->add_option("--horizon", overrides.horizon, "Number of recorded slots");
    sub->add_option("--threads", overrides.threads, "Worker threads (0 = all cores)");
  };

  auto* validate = app.add_subcommand("validate", "Check a configuration");
  validate->add_option("--config", config_path, "JSON configuration file")->required();
  validate->add_flag("--sweep", validate_sweep, "Validate as a sweep document");
  auto* solve = app.add_subcommand("solve", "Solve the stationary peak-age program only");
  add_common(solve);
  auto* simulate = app.add_subcommand("simulate", "Run one experiment configuration");
  add_common(simulate);
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep);
  auto* plotdata = app.add_subcommand("plotdata", "Emit per-figure tables from sweep results");
  plotdata->add_option("--results", results_dir, "Directory holding sweep outputs")->required();
  plotdata->add_option("--out", overrides.out, "Directory for figure tables (default: results dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*validate) return cmd_validate(config_path, validate_sweep);
    if (*solve) return cmd_solve(config_path, overrides);
    if (*simulate) return cmd_simulate(config_path, overrides);
    if (*sweep) return cmd_sweep(config_path, overrides);
    if (*plotdata) return cmd_plotdata(results_dir, overrides.out);
  } catch (const agesched::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const agesched::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const agesched::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
