#include "agesched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "agesched/simulation.hpp"
#include "internal.hpp"

namespace agesched {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---- JSON reading helpers -------------------------------------------------

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::uint64_t read_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(path, "expected a non-negative integer");
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> read_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TraceLevel parse_trace_level(const std::string& s, const std::string& path) {
  if (s == "none") return TraceLevel::none;
  if (s == "aggregates") return TraceLevel::aggregates;
  if (s == "full") return TraceLevel::full;
  throw ConfigError(path, "expected one of none|aggregates|full");
}

std::string trace_level_name(TraceLevel level) {
  switch (level) {
    case TraceLevel::none: return "none";
    case TraceLevel::aggregates: return "aggregates";
    case TraceLevel::full: return "full";
  }
  return "none";
}

NetworkConfig parse_network(const json& j) {
  require_object(j, "network");
  reject_unknown_keys(j, "network", {"n", "interference", "weights", "channel"});
  NetworkConfig net;
  if (!j.contains("n")) throw ConfigError("network.n", "missing");
  net.n = static_cast<std::size_t>(read_unsigned(j["n"], "network.n"));

  if (!j.contains("interference")) throw ConfigError("network.interference", "missing");
  const json& itf = require_object(j["interference"], "network.interference");
  if (itf.size() != 1) throw ConfigError("network.interference", "expected exactly one of kofn|explicit");
  if (itf.contains("kofn")) {
    net.interference = KofN{static_cast<std::size_t>(read_unsigned(itf["kofn"], "network.interference.kofn"))};
  } else if (itf.contains("explicit")) {
    const json& sets = itf["explicit"];
    const std::string path = "network.interference.explicit";
    if (!sets.is_array()) throw ConfigError(path, "expected an array of index lists");
    ExplicitFamily fam;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const std::string set_path = path + "[" + std::to_string(s) + "]";
      if (!sets[s].is_array()) throw ConfigError(set_path, "expected an array of link indices");
      std::vector<LinkIndex> members;
      for (std::size_t i = 0; i < sets[s].size(); ++i) {
        members.push_back(read_unsigned(sets[s][i], set_path + "[" + std::to_string(i) + "]"));
      }
      fam.sets.emplace_back(std::move(members));
    }
    net.interference = std::move(fam);
  } else {
    throw ConfigError("network.interference", "expected exactly one of kofn|explicit");
  }

  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (w.is_array()) {
      net.weights = read_number_list(w, "network.weights");
    } else {
      net.weights = read_number(w, "network.weights");
    }
  }

  if (!j.contains("channel")) throw ConfigError("network.channel", "missing");
  const json& ch = require_object(j["channel"], "network.channel");
  if (ch.contains("per_link")) {
    reject_unknown_keys(ch, "network.channel", {"per_link"});
    net.channel = PerLinkChannel{read_number_list(ch["per_link"], "network.channel.per_link")};
  } else {
    reject_unknown_keys(ch, "network.channel", {"good", "bad", "theta", "assignment", "assignment_seed"});
    TwoClassChannel tc;
    if (ch.contains("good")) tc.good = read_number(ch["good"], "network.channel.good");
    if (ch.contains("bad")) tc.bad = read_number(ch["bad"], "network.channel.bad");
    if (ch.contains("theta")) tc.theta = read_number(ch["theta"], "network.channel.theta");
    if (ch.contains("assignment")) {
      const auto a = read_string(ch["assignment"], "network.channel.assignment");
      if (a == "first") {
        tc.assignment = BadLinkAssignment::first;
      } else if (a == "seeded-random") {
        tc.assignment = BadLinkAssignment::seeded_random;
      } else {
        throw ConfigError("network.channel.assignment", "expected first|seeded-random");
      }
    }
    if (ch.contains("assignment_seed")) {
      tc.assignment_seed = read_unsigned(ch["assignment_seed"], "network.channel.assignment_seed");
    }
    net.channel = tc;
  }
  return net;
}

PolicyDescriptor parse_policy(const json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("kind")) throw ConfigError(path + ".kind", "missing");
  const auto kind = read_string(j["kind"], path + ".kind");
  PolicyDescriptor d;
  if (kind == "piC") {
    reject_unknown_keys(j, path, {"kind"});
    d.kind = PolicyKind::stationary;
  } else if (kind == "piQ") {
    reject_unknown_keys(j, path, {"kind", "V"});
    d.kind = PolicyKind::virtual_queue;
    if (j.contains("V")) d.v_param = read_number(j["V"], path + ".V");
  } else if (kind == "piA") {
    reject_unknown_keys(j, path, {"kind", "beta"});
    d.kind = PolicyKind::age_based;
    if (j.contains("beta")) d.beta = read_number(j["beta"], path + ".beta");
  } else if (kind == "roundrobin") {
    reject_unknown_keys(j, path, {"kind"});
    d.kind = PolicyKind::round_robin;
  } else {
    throw ConfigError(path + ".kind", "expected piC|piQ|piA|roundrobin");
  }
  return d;
}

ExperimentConfig parse_config_object(const json& j) {
  require_object(j, "$");
  ExperimentConfig cfg;
  if (!j.contains("network")) throw ConfigError("network", "missing");
  cfg.network = parse_network(j["network"]);

  if (!j.contains("policies") || !j["policies"].is_array()) throw ConfigError("policies[]", "expected an array");
  for (std::size_t i = 0; i < j["policies"].size(); ++i) {
    cfg.policies.push_back(parse_policy(j["policies"][i], "policies[" + std::to_string(i) + "]"));
  }
  if (j.contains("horizon")) cfg.horizon = read_unsigned(j["horizon"], "horizon");
  if (j.contains("warmup")) cfg.warmup = read_unsigned(j["warmup"], "warmup");
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) throw ConfigError("seeds", "expected an array");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < j["seeds"].size(); ++i) {
      cfg.seeds.push_back(read_unsigned(j["seeds"][i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("output")) cfg.output = read_string(j["output"], "output");
  if (j.contains("trace_level")) cfg.trace_level = parse_trace_level(read_string(j["trace_level"], "trace_level"), "trace_level");
  if (j.contains("solver")) {
    const json& sv = require_object(j["solver"], "solver");
    reject_unknown_keys(sv, "solver", {"tol", "max_iter"});
    if (sv.contains("tol")) cfg.solver.tol = read_number(sv["tol"], "solver.tol");
    if (sv.contains("max_iter")) cfg.solver.max_iter = read_unsigned(sv["max_iter"], "solver.max_iter");
  }
  validate_config(cfg);
  return cfg;
}

json policy_to_json(const PolicyDescriptor& d) {
  json j{{"kind", kind_name(d.kind)}};
  if (d.kind == PolicyKind::virtual_queue) j["V"] = d.v_param;
  if (d.kind == PolicyKind::age_based) j["beta"] = d.beta;
  return j;
}

json config_to_json(const ExperimentConfig& cfg) {
  json net;
  net["n"] = cfg.network.n;
  std::visit(overloaded{
                 [&](const KofN& kn) { net["interference"] = json{{"kofn", kn.k}}; },
                 [&](const ExplicitFamily& fam) {
                   json sets = json::array();
                   for (const auto& s : fam.sets) sets.push_back(s.members);
                   net["interference"] = json{{"explicit", sets}};
                 },
             },
             cfg.network.interference);
  std::visit([&](const auto& w) { net["weights"] = w; }, cfg.network.weights);
  std::visit(overloaded{
                 [&](const TwoClassChannel& tc) {
                   net["channel"] = json{{"good", tc.good},
                                         {"bad", tc.bad},
                                         {"theta", tc.theta},
                                         {"assignment", tc.assignment == BadLinkAssignment::first ? "first"
                                                                                                  : "seeded-random"},
                                         {"assignment_seed", tc.assignment_seed}};
                 },
                 [&](const PerLinkChannel& pl) { net["channel"] = json{{"per_link", pl.probs}}; },
             },
             cfg.network.channel);

  json policies = json::array();
  for (const auto& p : cfg.policies) policies.push_back(policy_to_json(p));

  return json{{"network", net},
              {"policies", policies},
              {"horizon", cfg.horizon},
              {"warmup", cfg.warmup},
              {"seeds", cfg.seeds},
              {"output", cfg.output},
              {"trace_level", trace_level_name(cfg.trace_level)},
              {"solver", json{{"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}}}};
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
}

PolicyState make_policy(const PolicyDescriptor& d, const NetworkSpec& spec, const StationarySolution& solution) {
  switch (d.kind) {
    case PolicyKind::stationary: return solution.policy();
    case PolicyKind::virtual_queue: return make_virtual_queue(spec, d.v_param);
    case PolicyKind::age_based: return make_age_based(d.beta);
    case PolicyKind::round_robin: return make_round_robin(spec);
  }
  throw std::logic_error("unknown policy kind");
}

double largest_residual(const std::vector<double>& residuals) {
  double worst = 0.0;
  for (double r : residuals) {
    if (std::abs(r) > std::abs(worst)) worst = r;
  }
  return worst;
}

}  // namespace

// ---- public API -----------------------------------------------------------

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::theta: return "theta";
    case SweepAxis::beta: return "beta";
    case SweepAxis::v_param: return "V";
    case SweepAxis::time: return "time";
  }
  return "theta";
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  const json j = parse_json_text(json_text);
  require_object(j, "$");
  reject_unknown_keys(j, "", {"network", "policies", "horizon", "warmup", "seeds", "output", "trace_level", "solver"});
  return parse_config_object(j);
}

std::string serialize_experiment_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

SweepSpec parse_sweep_spec(std::string_view json_text) {
  json j = parse_json_text(json_text);
  require_object(j, "$");
  reject_unknown_keys(j, "", {"network", "policies", "horizon", "warmup", "seeds", "output", "trace_level", "solver", "sweep"});
  if (!j.contains("sweep")) throw ConfigError("sweep", "missing");
  const json sw = require_object(j["sweep"], "sweep");
  reject_unknown_keys(sw, "sweep", {"axis", "values"});
  j.erase("sweep");

  SweepSpec spec;
  if (!sw.contains("axis")) throw ConfigError("sweep.axis", "missing");
  const auto axis = read_string(sw["axis"], "sweep.axis");
  if (axis == "theta") {
    spec.axis = SweepAxis::theta;
  } else if (axis == "beta") {
    spec.axis = SweepAxis::beta;
  } else if (axis == "V") {
    spec.axis = SweepAxis::v_param;
  } else if (axis == "time") {
    spec.axis = SweepAxis::time;
  } else {
    throw ConfigError("sweep.axis", "expected theta|beta|V|time");
  }
  if (!sw.contains("values")) throw ConfigError("sweep.values", "missing");
  spec.values = read_number_list(sw["values"], "sweep.values");
  if (spec.values.empty()) throw ConfigError("sweep.values", "must be non-empty");
  spec.base = parse_config_object(j);

  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    const std::string path = "sweep.values[" + std::to_string(i) + "]";
    switch (spec.axis) {
      case SweepAxis::theta:
        if (!std::holds_alternative<TwoClassChannel>(spec.base.network.channel)) {
          throw ConfigError("network.channel", "theta sweeps need a good/bad channel description");
        }
        if (v < 0.0 || v > 1.0) throw ConfigError(path, "theta must lie in [0, 1]");
        break;
      case SweepAxis::beta:
        if (v < -1.0) throw ConfigError(path, "beta must be at least -1");
        break;
      case SweepAxis::v_param:
        if (v <= 0.0) throw ConfigError(path, "V must be positive");
        break;
      case SweepAxis::time:
        if (v < 1.0 || v != std::floor(v) || v > static_cast<double>(spec.base.horizon)) {
          throw ConfigError(path, "checkpoints must be integers in [1, horizon]");
        }
        break;
    }
  }
  return spec;
}

std::string serialize_sweep_spec(const SweepSpec& sweep) {
  json j = config_to_json(sweep.base);
  j["sweep"] = json{{"axis", axis_name(sweep.axis)}, {"values", sweep.values}};
  return j.dump(2) + "\n";
}

std::string config_hash(std::string_view canonical_text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NetworkSpec build_network(const NetworkConfig& config) {
  const std::size_t n = config.n;
  NetworkSpec spec;
  spec.interference = config.interference;
  std::visit(overloaded{
                 [&](double w) { spec.weights.assign(n, w); },
                 [&](const std::vector<double>& w) { spec.weights = w; },
             },
             config.weights);
  std::visit(overloaded{
                 [&](const TwoClassChannel& tc) {
                   spec.success_probs.assign(n, tc.good);
                   const auto bad_count = static_cast<std::size_t>(
                       std::ceil(tc.theta * static_cast<double>(n) - 1e-9));
                   std::vector<LinkIndex> order(n);
                   for (LinkIndex e = 0; e < n; ++e) order[e] = e;
                   if (tc.assignment == BadLinkAssignment::seeded_random) {
                     // Fisher-Yates driven by the counter stream, so the
                     // assignment is identical on every platform.
                     const CounterRng rng(tc.assignment_seed);
                     for (std::size_t i = n; i > 1; --i) {
                       const std::size_t j = rng.bits(i, 0) % i;
                       std::swap(order[i - 1], order[j]);
                     }
                   }
                   for (std::size_t i = 0; i < std::min(bad_count, n); ++i) spec.success_probs[order[i]] = tc.bad;
                 },
                 [&](const PerLinkChannel& pl) { spec.success_probs = pl.probs; },
             },
             config.channel);
  return spec;
}

void validate_config(const ExperimentConfig& config) {
  const auto& net = config.network;
  if (net.n == 0) throw ConfigError("network.n", "must be at least 1");
  if (const auto* w = std::get_if<std::vector<double>>(&net.weights); w && w->size() != net.n) {
    throw ConfigError("network.weights", "expected " + std::to_string(net.n) + " entries");
  }
  if (const auto* tc = std::get_if<TwoClassChannel>(&net.channel)) {
    if (tc->theta < 0.0 || tc->theta > 1.0) throw ConfigError("network.channel.theta", "must lie in [0, 1]");
    if (!(tc->good > 0.0 && tc->good <= 1.0)) throw ConfigError("network.channel.good", "must lie in (0, 1]");
    if (!(tc->bad > 0.0 && tc->bad <= 1.0)) throw ConfigError("network.channel.bad", "must lie in (0, 1]");
  } else {
    const auto& pl = std::get<PerLinkChannel>(net.channel);
    if (pl.probs.size() != net.n) {
      throw ConfigError("network.channel.per_link", "expected " + std::to_string(net.n) + " entries");
    }
  }
  if (config.policies.empty()) throw ConfigError("policies[]", "at least one policy is required");
  for (std::size_t i = 0; i < config.policies.size(); ++i) {
    const auto& p = config.policies[i];
    const std::string path = "policies[" + std::to_string(i) + "]";
    if (p.kind == PolicyKind::virtual_queue && !(p.v_param > 0.0)) throw ConfigError(path + ".V", "must be positive");
    if (p.kind == PolicyKind::age_based && !(p.beta >= -1.0)) throw ConfigError(path + ".beta", "must be at least -1");
  }
  if (config.horizon == 0) throw ConfigError("horizon", "must be at least 1");
  if (config.seeds.empty()) throw ConfigError("seeds", "must be non-empty");
  if (!(config.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  if (config.solver.max_iter == 0) throw ConfigError("solver.max_iter", "must be at least 1");

  const auto spec = build_network(net);
  const auto violations = validate_network(spec);
  if (!violations.empty()) throw ConfigError("network", violations.front().message);
  for (std::size_t i = 0; i < config.policies.size(); ++i) {
    if (config.policies[i].kind == PolicyKind::round_robin && !singletons_feasible(spec)) {
      throw ConfigError("policies[" + std::to_string(i) + "]", "round robin needs every single-link set feasible");
    }
  }
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_run_rows(const std::string& hash, const RunRecord& run, const NetworkSpec& spec) {
  const auto& r = run.result;
  const std::string lead = hash + "," + std::to_string(run.seed) + "," + run.axis_value + "," + run.policy.name() + ",";
  std::string out;
  std::uint64_t successes = 0;
  std::uint64_t activations = 0;
  for (std::size_t e = 0; e < spec.link_count(); ++e) {
    out += lead + std::to_string(e) + "," + format_number(r.per_link_peak[e]) + "," +
           format_number(r.per_link_avg[e]) + "," + std::to_string(r.success_counts[e]) + "," +
           std::to_string(r.activation_counts[e]) + "," + format_number(r.conservation_residual[e]) + "\n";
    successes += r.success_counts[e];
    activations += r.activation_counts[e];
  }
  out += lead + "net," + format_number(r.network_peak) + "," + format_number(r.network_avg) + "," +
         std::to_string(successes) + "," + std::to_string(activations) + "," +
         format_number(largest_residual(r.conservation_residual)) + "\n";
  return out;
}

std::string format_trace_csv(const std::vector<SlotTrace>& trace, std::size_t link_count) {
  std::string out(kTraceCsvHeader);
  out += '\n';
  for (const auto& slot : trace) {
    out += std::to_string(slot.t);
    out += ',';
    for (std::size_t i = 0; i < slot.scheduled.members.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(slot.scheduled.members[i]);
    }
    out += ',';
    for (std::size_t e = 0; e < link_count; ++e) out += slot.successes[e] ? '1' : '0';
    out += '\n';
  }
  return out;
}

namespace detail {

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, std::string_view suffix) {
  return std::filesystem::path(prefix.string() + std::string(suffix));
}

std::string format_bound_rows(const std::string& hash, const RunRecord& run) {
  std::string out;
  for (const auto& b : run.bounds) {
    out += hash + "," + std::to_string(run.seed) + "," + run.axis_value + "," + run.policy.name() + "," +
           bound_name(b.name) + "," + format_number(b.lhs) + "," + format_number(b.rhs) + "," +
           format_number(b.slack) + "," + (b.satisfied ? "true" : "false") + "\n";
  }
  return out;
}

ExperimentResults compute_point(const ExperimentConfig& config, const std::vector<std::uint64_t>& checkpoints,
                                unsigned threads) {
  validate_config(config);
  ExperimentResults out;
  out.config_hash = config_hash(serialize_experiment_config(config));
  out.network = build_network(config.network);
  out.solution = solve_stationary(out.network, config.solver);
  if (!out.solution.converged) {
    throw SolverError("stationary solver stopped after " + std::to_string(out.solution.iterations) +
                      " iterations with duality gap " + format_number(out.solution.gap));
  }
  out.lower_bound = average_age_lower_bound(out.solution.peak_opt, out.network);

  const std::size_t seeds = config.seeds.size();
  out.runs.resize(config.policies.size() * seeds);
  parallel_for(out.runs.size(), threads, [&](std::size_t job) {
    const auto& policy = config.policies[job / seeds];
    RunConfig run;
    run.horizon = config.horizon;
    run.seed = config.seeds[job % seeds];
    run.warmup = config.warmup;
    run.trace_level = config.trace_level;
    run.checkpoints = checkpoints;
    auto& record = out.runs[job];
    record.policy = policy;
    record.seed = run.seed;
    record.result = run_simulation(out.network, make_policy(policy, out.network, out.solution), policy, run);
  });

  for (auto& record : out.runs) {
    std::optional<double> stationary_avg = out.solution.peak_opt;
    for (const auto& other : out.runs) {
      if (other.policy.kind == PolicyKind::stationary && other.seed == record.seed) {
        stationary_avg = other.result.network_avg;
        break;
      }
    }
    record.bounds = bound_reports(record.result, out.solution, out.network, stationary_avg);
  }
  return out;
}

}  // namespace detail

ExperimentResults compute_experiment(const ExperimentConfig& config, unsigned threads) {
  return detail::compute_point(config, {}, threads);
}

std::vector<std::filesystem::path> write_experiment(const ExperimentConfig& config, const ExperimentResults& results,
                                                    const std::filesystem::path& prefix) {
  using detail::with_suffix;
  using detail::write_file;
  std::vector<std::filesystem::path> written;

  std::string runs(kRunCsvHeader);
  runs += '\n';
  std::string bounds(kBoundCsvHeader);
  bounds += '\n';
  for (const auto& run : results.runs) {
    runs += format_run_rows(results.config_hash, run, results.network);
    bounds += detail::format_bound_rows(results.config_hash, run);
  }
  written.push_back(with_suffix(prefix, "_runs.csv"));
  write_file(written.back(), runs);
  written.push_back(with_suffix(prefix, "_bounds.csv"));
  write_file(written.back(), bounds);

  const auto& sol = results.solution;
  json support = json::array();
  for (const auto& s : sol.support) support.push_back(s.members);
  const json solution{{"support", support},
                      {"probs", sol.probs},
                      {"freqs", sol.freqs},
                      {"peak_opt", sol.peak_opt},
                      {"gap", sol.gap},
                      {"iterations", sol.iterations},
                      {"converged", sol.converged},
                      {"lower_bound", results.lower_bound}};
  written.push_back(with_suffix(prefix, "_solution.json"));
  write_file(written.back(), solution.dump(2) + "\n");

  json meta{{"kind", "experiment"},
            {"config", config_to_json(config)},
            {"config_hash", results.config_hash},
            {"n", results.network.link_count()},
            {"sum_w", results.network.weight_sum()}};
  if (const auto* kn = std::get_if<KofN>(&results.network.interference)) meta["k"] = kn->k;
  written.push_back(with_suffix(prefix, "_meta.json"));
  write_file(written.back(), meta.dump(2) + "\n");

  if (config.trace_level != TraceLevel::none) {
    for (const auto& run : results.runs) {
      std::string name = run.policy.name();
      std::replace_if(name.begin(), name.end(), [](char c) { return c == '(' || c == ')' || c == '='; }, '_');
      written.push_back(with_suffix(prefix, "_trace_" + name + "_seed" + std::to_string(run.seed) + ".csv"));
      write_file(written.back(), format_trace_csv(run.result.trace, results.network.link_count()));
    }
  }
  return written;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, unsigned threads) {
  const auto results = compute_experiment(config, threads);
  return write_experiment(config, results, config.output);
}

}  // namespace agesched
