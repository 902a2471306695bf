#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "agesched/experiment.hpp"
#include "internal.hpp"

namespace agesched {

using nlohmann::json;

namespace {

struct SweepInput {
  std::filesystem::path prefix;
  std::string axis;
  std::string k_label;  // "K5", or "explicit"
  std::uint64_t horizon = 0;
  std::size_t n = 1;
};

struct NetRow {
  double x = 0.0;
  std::string policy;
  double peak = 0.0;
  double avg = 0.0;
};

struct Series {
  std::vector<double> values;

  void add(double v) { values.push_back(v); }
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  double stderr_of_mean() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
  }
};

// (series, x) -> samples; std::map keeps the output order canonical.
using Table = std::map<std::pair<std::string, double>, Series>;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::vector<NetRow> read_net_rows(const std::filesystem::path& csv) {
  const std::string text = detail::read_file(csv);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != kRunCsvHeader) throw IoError(csv.string() + ": unexpected header");
  std::vector<NetRow> rows;
  while (std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() != 10) throw IoError(csv.string() + ": malformed row");
    if (f[4] != "net") continue;
    rows.push_back({std::stod(f[2]), f[3], std::stod(f[5]), std::stod(f[6])});
  }
  return rows;
}

std::map<double, double> read_lower_bounds(const std::filesystem::path& csv) {
  const std::string text = detail::read_file(csv);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::map<double, double> out;
  while (std::getline(in, line)) {
    const auto f = split(line);
    if (f.size() != 6) throw IoError(csv.string() + ": malformed row");
    out[std::stod(f[0])] = std::stod(f[2]);
  }
  return out;
}

std::string render(const Table& table) {
  std::string out(kPlotCsvHeader);
  out += '\n';
  for (const auto& [key, series] : table) {
    out += format_number(key.second) + "," + key.first + "," + format_number(series.mean()) + "," +
           format_number(series.stderr_of_mean()) + "\n";
  }
  return out;
}

std::vector<SweepInput> discover(const std::filesystem::path& dir) {
  std::vector<SweepInput> found;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return found;
  std::vector<std::filesystem::path> metas;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    if (name.size() > 10 && name.ends_with("_meta.json")) metas.push_back(entry.path());
  }
  std::sort(metas.begin(), metas.end());
  for (const auto& path : metas) {
    json meta;
    try {
      meta = json::parse(detail::read_file(path));
    } catch (const json::exception&) {
      continue;
    }
    if (meta.value("kind", "") != "sweep") continue;
    SweepInput in;
    const auto name = path.filename().string();
    in.prefix = path.parent_path() / name.substr(0, name.size() - std::string_view("_meta.json").size());
    in.axis = meta.value("axis", "");
    in.k_label = meta.contains("k") ? "K" + std::to_string(meta["k"].get<std::size_t>()) : "explicit";
    in.horizon = meta.value("horizon", std::uint64_t{0});
    in.n = std::max<std::size_t>(1, meta.value("n", std::size_t{1}));
    found.push_back(std::move(in));
  }
  return found;
}

}  // namespace

std::vector<FigureStatus> emit_plot_data(const std::filesystem::path& results_dir,
                                         const std::filesystem::path& out_dir) {
  const auto inputs = discover(results_dir);

  struct Figure {
    std::string name;
    std::string axis;
    std::string file;
    Table table;
    std::vector<std::string> problems;
    bool any_input = false;
  };
  std::vector<Figure> figures{
      {"fig2", "theta", "fig2_peak_per_link.csv", {}, {}, false},
      {"fig3", "theta", "fig3_avg_per_link.csv", {}, {}, false},
      {"fig4", "time", "fig4_running_peak.csv", {}, {}, false},
      {"fig5", "beta", "fig5_beta.csv", {}, {}, false},
  };

  for (auto& fig : figures) {
    for (const auto& in : inputs) {
      if (in.axis != fig.axis) continue;
      const auto sweep_csv = detail::with_suffix(in.prefix, "_sweep.csv");
      std::vector<NetRow> rows;
      try {
        rows = read_net_rows(sweep_csv);
      } catch (const std::exception& e) {
        fig.problems.push_back(std::string("missing or unreadable input: ") + e.what());
        continue;
      }
      fig.any_input = true;
      const double n = static_cast<double>(in.n);
      for (const auto& r : rows) {
        if (fig.name == "fig2") {
          fig.table[{r.policy + "_" + in.k_label, r.x}].add(r.peak / n);
        } else if (fig.name == "fig3") {
          fig.table[{r.policy + "_" + in.k_label, r.x}].add(r.avg / n);
        } else if (fig.name == "fig4") {
          fig.table[{r.policy + "_" + in.k_label + "_T" + std::to_string(in.horizon), r.x}].add(r.peak / n);
        } else {
          fig.table[{"peak_" + in.k_label, r.x}].add(r.peak / n);
          fig.table[{"avg_" + in.k_label, r.x}].add(r.avg / n);
        }
      }
      if (fig.name == "fig3") {
        try {
          for (const auto& [x, bound] : read_lower_bounds(detail::with_suffix(in.prefix, "_solutions.csv"))) {
            fig.table[{"lower_bound_" + in.k_label, x}].add(bound / n);
          }
        } catch (const std::exception& e) {
          fig.problems.push_back(std::string("missing lower-bound input: ") + e.what());
        }
      }
    }
  }

  std::vector<FigureStatus> status;
  for (auto& fig : figures) {
    FigureStatus s;
    s.figure = fig.name;
    s.path = out_dir / fig.file;
    if (!fig.any_input) {
      s.message = "missing inputs: no " + fig.axis + " sweep results in " + results_dir.string();
      for (const auto& p : fig.problems) s.message += "; " + p;
    } else {
      detail::write_file(s.path, render(fig.table));
      s.written = true;
      s.message = fig.problems.empty() ? "ok" : "partial: ";
      for (std::size_t i = 0; i < fig.problems.size(); ++i) s.message += (i ? "; " : "") + fig.problems[i];
    }
    status.push_back(std::move(s));
  }
  return status;
}

}  // namespace agesched
