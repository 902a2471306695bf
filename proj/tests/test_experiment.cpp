#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "agesched/experiment.hpp"
#include "support/oracles.hpp"

namespace agesched {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("agesched_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

const char* kBaseConfig = R"({
  "network": {"n": 20, "interference": {"kofn": 5}, "weights": 1, "channel": {"good": 0.9, "bad": 0.1, "theta": 0}},
  "policies": [{"kind": "piC"}, {"kind": "piQ", "V": 1}, {"kind": "piA", "beta": 1}],
  "horizon": 100000,
  "seeds": [1, 2]
})";

void expect_config_error(const std::string& text, const std::string& field) {
  try {
    (void)parse_experiment_config(text);
    ADD_FAILURE() << "expected ConfigError for " << field;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

TEST(ParseConfig, BaseCaseAndDefaults) {
  const auto cfg = parse_experiment_config(kBaseConfig);
  EXPECT_EQ(cfg.network.n, 20U);
  EXPECT_EQ(std::get<KofN>(cfg.network.interference).k, 5U);
  ASSERT_EQ(cfg.policies.size(), 3U);
  EXPECT_EQ(cfg.policies[1].kind, PolicyKind::virtual_queue);
  EXPECT_EQ(cfg.policies[2].beta, 1.0);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(cfg.warmup, 0U);
  EXPECT_EQ(cfg.trace_level, TraceLevel::none);

  const auto minimal = parse_experiment_config(
      R"({"network": {"n": 3, "interference": {"kofn": 1}, "channel": {}}, "policies": [{"kind": "piA"}]})");
  EXPECT_EQ(minimal.horizon, 100000U);
  EXPECT_EQ(minimal.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_EQ(minimal.policies[0].beta, 1.0);
  EXPECT_EQ(std::get<TwoClassChannel>(minimal.network.channel).good, 0.9);
  EXPECT_EQ(minimal.solver.tol, 1e-9);
  EXPECT_EQ(minimal.solver.max_iter, 100000U);
}

TEST(ParseConfig, FieldPathsInErrors) {
  expect_config_error(R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}}, "policies": []})",
                      "policies[]");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {"theta": 1.5}}, "policies": [{"kind": "piC"}]})",
      "network.channel.theta");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}}, "policies": [{"kind": "piX"}]})",
      "policies[0].kind");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}}, "policies": [{"kind": "piC"}, {"kind": "piA", "beta": -2}]})",
      "policies[1].beta");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}}, "policies": [{"kind": "piQ", "V": 0}]})",
      "policies[0].V");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}}, "policies": [{"kind": "piC"}], "colour": 1})",
      "colour");
  expect_config_error(R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {}, "extra": 0},
                          "policies": [{"kind": "piC"}]})",
                      "network.extra");
  expect_config_error(
      R"({"network": {"n": 2, "interference": {"kofn": 1}, "channel": {"per_link": [0.5]}}, "policies": [{"kind": "piC"}]})",
      "network.channel.per_link");
  expect_config_error(R"({"network": {"n": 2, "interference": {"explicit": [[0]]}, "channel": {}},
                          "policies": [{"kind": "piC"}]})",
                      "network");
  expect_config_error(R"({"network": {"n": 2, "interference": {"explicit": [[0, 1]]}, "channel": {}},
                          "policies": [{"kind": "roundrobin"}]})",
                      "policies[0]");
  expect_config_error("{not json", "$");
}

// Property: parse -> serialize -> parse is the identity on the canonical form.
TEST(ConfigProperty, RoundTrip) {
  const std::vector<std::string> docs{
      kBaseConfig,
      R"({"network": {"n": 4, "interference": {"explicit": [[0], [1], [0, 1], [2], [3], [1, 3]]}, "weights": [1, 2, 3, 4],
           "channel": {"per_link": [0.5, 0.6, 0.7, 1.0]}},
          "policies": [{"kind": "roundrobin"}, {"kind": "piQ", "V": 0.1}], "horizon": 77, "warmup": 4,
          "seeds": [9], "output": "x/y", "trace_level": "full", "solver": {"tol": 1e-7, "max_iter": 50}})",
      R"({"network": {"n": 10, "interference": {"kofn": 3},
           "channel": {"theta": 0.3, "assignment": "seeded-random", "assignment_seed": 12}},
          "policies": [{"kind": "piA", "beta": -0.5}]})",
  };
  for (const auto& doc : docs) {
    const auto canonical = serialize_experiment_config(parse_experiment_config(doc));
    EXPECT_EQ(serialize_experiment_config(parse_experiment_config(canonical)), canonical);
    EXPECT_EQ(config_hash(canonical).size(), 16U);
  }
  const auto sweep = parse_sweep_spec(
      std::string(kBaseConfig).insert(1, R"("sweep": {"axis": "theta", "values": [0, 0.5, 1]},)"));
  const auto canonical = serialize_sweep_spec(sweep);
  EXPECT_EQ(serialize_sweep_spec(parse_sweep_spec(canonical)), canonical);
}

TEST(ConfigHash, Fnv1a) {
  EXPECT_EQ(config_hash(""), "cbf29ce484222325");
  EXPECT_EQ(config_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(config_hash("{\"a\": 1}"), config_hash("{\"a\": 2}"));
}

TEST(ParseSweep, Errors) {
  auto with_sweep = [](const std::string& sweep) { return std::string(kBaseConfig).insert(1, sweep); };
  EXPECT_THROW(parse_sweep_spec(kBaseConfig), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "gamma", "values": [1]},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "theta", "values": []},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "theta", "values": [2]},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "time", "values": [0]},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "time", "values": [200000]},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "beta", "values": [-3]},)")), ConfigError);
  EXPECT_THROW(parse_sweep_spec(with_sweep(R"("sweep": {"axis": "V", "values": [0]},)")), ConfigError);
}

TEST(BuildNetwork, BadLinksFirst) {
  NetworkConfig net;
  net.n = 20;
  net.interference = KofN{5};
  net.channel = TwoClassChannel{0.9, 0.1, 0.25, BadLinkAssignment::first, 0};
  const auto spec = build_network(net);
  for (std::size_t e = 0; e < 20; ++e) EXPECT_EQ(spec.success_probs[e], e < 5 ? 0.1 : 0.9);
  net.channel = TwoClassChannel{0.9, 0.1, 0.26, BadLinkAssignment::first, 0};
  EXPECT_EQ(build_network(net).success_probs[5], 0.1);
  EXPECT_EQ(build_network(net).success_probs[6], 0.9);
}

TEST(BuildNetwork, SeededRandomAssignment) {
  NetworkConfig net;
  net.n = 20;
  net.channel = TwoClassChannel{0.9, 0.1, 0.25, BadLinkAssignment::seeded_random, 7};
  const auto a = build_network(net);
  EXPECT_EQ(build_network(net).success_probs, a.success_probs);
  EXPECT_EQ(std::count(a.success_probs.begin(), a.success_probs.end(), 0.1), 5);
  std::set<std::vector<double>> distinct;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::get<TwoClassChannel>(net.channel).assignment_seed = seed;
    distinct.insert(build_network(net).success_probs);
  }
  EXPECT_GT(distinct.size(), 5U);
}

TEST(FormatNumber, Forms) {
  EXPECT_EQ(format_number(4.0), "4");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(INFINITY), "inf");
}

TEST(ComputeExperiment, BaseCase) {
  const auto cfg = parse_experiment_config(kBaseConfig);
  const auto results = compute_experiment(cfg);
  EXPECT_NEAR(results.solution.peak_opt / 20.0, 4.444, 1e-3);
  EXPECT_NEAR(results.lower_bound / 20.0, 2.7222, 1e-4);
  ASSERT_EQ(results.runs.size(), 6U);
  for (const auto& run : results.runs) {
    EXPECT_NEAR(run.result.network_peak / 20.0, 4.444, 0.05 * 4.444) << run.policy.name();
    for (const auto& b : run.bounds) EXPECT_TRUE(b.satisfied) << run.policy.name() << " " << bound_name(b.name);
  }
  EXPECT_EQ(results.runs[0].policy.kind, PolicyKind::stationary);
  EXPECT_EQ(results.runs[1].seed, 2U);
  EXPECT_EQ(results.runs[2].policy.kind, PolicyKind::virtual_queue);
}

TEST(ComputeExperiment, AllBadChannels) {
  auto cfg = parse_experiment_config(kBaseConfig);
  std::get<TwoClassChannel>(cfg.network.channel).theta = 1.0;
  cfg.policies = {PolicyDescriptor{PolicyKind::stationary}};
  cfg.seeds = {1};
  const auto results = compute_experiment(cfg);
  EXPECT_NEAR(results.runs[0].result.network_peak / 20.0, 40.0, 0.05 * 40.0);
}

TEST(ComputeExperiment, MixedChannelMatchesWaterfill) {
  auto cfg = parse_experiment_config(kBaseConfig);
  std::get<TwoClassChannel>(cfg.network.channel).theta = 0.25;
  cfg.policies = {PolicyDescriptor{PolicyKind::stationary}};
  cfg.seeds = {3};
  const auto results = compute_experiment(cfg);
  // Level sqrt(1/gamma): 5 bad links at sqrt(10), 15 good at sqrt(10/9), budget 5.
  const double nu = (5 * std::sqrt(10.0) + 15 * std::sqrt(1.0 / 0.9)) / 5.0;
  const double f_bad = std::sqrt(10.0) / nu;
  const double f_good = std::sqrt(1.0 / 0.9) / nu;
  const double expected = (5.0 / (0.1 * f_bad) + 15.0 / (0.9 * f_good)) / 20.0;
  EXPECT_NEAR(results.solution.peak_opt / 20.0, expected, 1e-9);
  EXPECT_NEAR(results.runs[0].result.network_peak / 20.0, expected, 0.05 * expected);
}

TEST(ComputeExperiment, SolverFailureThrows) {
  auto cfg = parse_experiment_config(kBaseConfig);
  std::get<TwoClassChannel>(cfg.network.channel).theta = 0.25;
  cfg.solver = SolverOptions{1e-300, 2};
  EXPECT_THROW(compute_experiment(cfg), SolverError);
}

// Property: identical configs give byte-identical files, independent of the
// worker count.
TEST(ExperimentProperty, ByteIdenticalOutputs) {
  TempDir dir;
  auto cfg = parse_experiment_config(kBaseConfig);
  cfg.horizon = 5000;
  cfg.seeds = {1, 2, 3};
  cfg.policies.push_back(PolicyDescriptor{PolicyKind::round_robin});
  cfg.trace_level = TraceLevel::aggregates;
  const auto a = write_experiment(cfg, compute_experiment(cfg, 1), dir.path() / "a" / "exp");
  const auto b = write_experiment(cfg, compute_experiment(cfg, 4), dir.path() / "b" / "exp");
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.size(), 4U + 12U);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].filename(), b[i].filename());
    EXPECT_EQ(slurp(a[i]), slurp(b[i])) << a[i];
  }
}

TEST(WriteExperiment, RowsCarryHashAndSeed) {
  TempDir dir;
  auto cfg = parse_experiment_config(kBaseConfig);
  cfg.horizon = 2000;
  const auto results = compute_experiment(cfg);
  write_experiment(cfg, results, dir.path() / "exp");
  const auto rows = lines_of(slurp(dir.path() / "exp_runs.csv"));
  ASSERT_EQ(rows.front(), kRunCsvHeader);
  ASSERT_EQ(rows.size(), 1U + 3 * 2 * 21);
  std::size_t net_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields_of(rows[i]);
    ASSERT_EQ(f.size(), 10U) << rows[i];
    EXPECT_EQ(f[0], results.config_hash);
    EXPECT_TRUE(f[1] == "1" || f[1] == "2");
    net_rows += f[4] == "net" ? 1 : 0;
  }
  EXPECT_EQ(net_rows, 6U);
  const auto bounds = lines_of(slurp(dir.path() / "exp_bounds.csv"));
  EXPECT_EQ(bounds.front(), kBoundCsvHeader);
  for (std::size_t i = 1; i < bounds.size(); ++i) EXPECT_EQ(fields_of(bounds[i])[0], results.config_hash);
  EXPECT_TRUE(fs::exists(dir.path() / "exp_solution.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "exp_meta.json"));
}

TEST(WriteExperiment, TraceCsv) {
  std::vector<SlotTrace> trace{{0, ActivationSet(std::vector<LinkIndex>{0, 2}), {true, false, false}, {}},
                               {1, ActivationSet(), {false, false, false}, {}}};
  EXPECT_EQ(format_trace_csv(trace, 3), "t,scheduled,successes\n0,0 2,100\n1,,000\n");
}

SweepSpec small_sweep(SweepAxis axis, std::vector<double> values) {
  SweepSpec s;
  s.axis = axis;
  s.values = std::move(values);
  s.base = parse_experiment_config(kBaseConfig);
  s.base.horizon = 3000;
  return s;
}

TEST(Sweep, ThetaRows) {
  TempDir dir;
  auto s = small_sweep(SweepAxis::theta, {0, 0.5, 1});
  s.base.output = (dir.path() / "theta").string();
  run_sweep(s);
  const auto rows = lines_of(slurp(dir.path() / "theta_sweep.csv"));
  EXPECT_EQ(rows.size(), 1U + 3 * 3 * 2 * 21);
  EXPECT_EQ(fields_of(rows[1])[2], "0");
  EXPECT_EQ(fields_of(rows.back())[2], "1");
  const auto sol = lines_of(slurp(dir.path() / "theta_solutions.csv"));
  EXPECT_EQ(sol.size(), 4U);
}

TEST(Sweep, BetaAndVFilterPolicies) {
  const auto beta = compute_sweep(small_sweep(SweepAxis::beta, {-0.5, 2}));
  ASSERT_EQ(beta.points.size(), 2U);
  for (const auto& p : beta.points) {
    ASSERT_EQ(p.results.runs.size(), 2U);
    for (const auto& r : p.results.runs) {
      EXPECT_EQ(r.policy.kind, PolicyKind::age_based);
      EXPECT_EQ(r.policy.beta, p.axis_value);
    }
  }
  const auto v = compute_sweep(small_sweep(SweepAxis::v_param, {0.1}));
  EXPECT_EQ(v.points[0].results.runs[0].policy.name(), "piQ(V=0.1)");

  auto none = small_sweep(SweepAxis::beta, {0});
  none.base.policies = {PolicyDescriptor{PolicyKind::stationary}};
  EXPECT_THROW(compute_sweep(none), ConfigError);
}

TEST(Sweep, TimeCheckpoints) {
  TempDir dir;
  auto s = small_sweep(SweepAxis::time, {10, 100, 3000});
  s.base.output = (dir.path() / "time").string();
  const auto results = compute_sweep(s);
  write_sweep(s, results, s.base.output);
  const auto rows = lines_of(slurp(dir.path() / "time_sweep.csv"));
  EXPECT_EQ(rows.size(), 1U + 3 * 3 * 2 * 21);
  // The final checkpoint equals the full-horizon result.
  const auto& run = results.points[0].results.runs[0];
  EXPECT_EQ(run.result.checkpoints.back().network_peak, run.result.network_peak);
  std::set<std::string> axis_values;
  for (std::size_t i = 1; i < rows.size(); ++i) axis_values.insert(fields_of(rows[i])[2]);
  EXPECT_EQ(axis_values, (std::set<std::string>{"10", "100", "3000"}));
}

TEST(PlotData, EmptyDirectoryReportsMissingInputs) {
  TempDir dir;
  const auto status = emit_plot_data(dir.path(), dir.path() / "plots");
  ASSERT_EQ(status.size(), 4U);
  for (const auto& s : status) {
    EXPECT_FALSE(s.written);
    EXPECT_NE(s.message.find("missing inputs"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir.path() / "plots"));
}

TEST(PlotData, ThetaSweepFeedsPeakAndAverageTables) {
  TempDir dir;
  auto s = small_sweep(SweepAxis::theta, {0, 1});
  s.base.output = (dir.path() / "k5").string();
  run_sweep(s);
  const auto status = emit_plot_data(dir.path(), dir.path() / "plots");
  EXPECT_TRUE(status[0].written);
  EXPECT_TRUE(status[1].written);
  EXPECT_FALSE(status[2].written);
  EXPECT_FALSE(status[3].written);

  const auto fig2 = lines_of(slurp(dir.path() / "plots" / "fig2_peak_per_link.csv"));
  EXPECT_EQ(fig2.front(), kPlotCsvHeader);
  EXPECT_EQ(fig2.size(), 1U + 3 * 2);
  bool saw_pic = false;
  for (std::size_t i = 1; i < fig2.size(); ++i) {
    const auto f = fields_of(fig2[i]);
    if (f[1] == "piC_K5" && f[0] == "0") {
      saw_pic = true;
      EXPECT_NEAR(std::stod(f[2]), 4.444, 0.05 * 4.444);
      EXPECT_GT(std::stod(f[3]), 0.0);
    }
  }
  EXPECT_TRUE(saw_pic);
  const auto fig3 = slurp(dir.path() / "plots" / "fig3_avg_per_link.csv");
  EXPECT_NE(fig3.find("0,lower_bound_K5,2.72222222222,0"), std::string::npos) << fig3;
}

}  // namespace
}  // namespace agesched
