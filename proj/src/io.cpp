#include "lapdeconv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lapdeconv/errors.hpp"

namespace lapdeconv {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_field(const std::string& field, std::size_t line) {
  const std::string f = trim(field);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(f, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (f.empty() || used != f.size() || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(line) + ": '" + f + "' is not a finite number");
  }
  return v;
}

}  // namespace

SeriesCsv read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("input CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  {
    std::stringstream header(line);
    std::string a, b, extra;
    std::getline(header, a, ',');
    std::getline(header, b, ',');
    if (trim(a) != "t" || trim(b) != "y" || std::getline(header, extra, ',')) {
      throw InputError("input CSV must start with the header 't,y'");
    }
  }
  SeriesCsv out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::stringstream row(line);
    std::string a, b, extra;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || std::getline(row, extra, ',')) {
      throw InputError("line " + std::to_string(number) + ": expected exactly two fields");
    }
    const double t = parse_field(a, number);
    const double y = parse_field(b, number);
    if (!out.t.empty() && t < out.t.back()) {
      throw InputError("line " + std::to_string(number) + ": t column is not sorted ascending");
    }
    out.t.push_back(t);
    out.y.push_back(y);
  }
  if (out.t.size() < 2) throw InputError("input CSV needs at least 2 data rows");
  return out;
}

SeriesCsv read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return read_series_csv(in);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_columns_csv(std::ostream& out, const std::string& header_a, const std::string& header_b,
                       const std::vector<double>& a, const std::vector<double>& b) {
  out << header_a << ',' << header_b << '\n';
  for (std::size_t k = 0; k < a.size(); ++k) out << format_double(a[k]) << ',' << format_double(b[k]) << '\n';
}

void write_report_csv(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << "g,f,n,i,mean,std,runs,failures\n";
  for (const auto& r : results) {
    const auto& sc = r.scenario;
    out << sc.g_name << ',' << sc.f_name << ',' << sc.n << ',' << sc.noise_index << ','
        << format_double(r.mean) << ',' << format_double(r.std) << ',' << sc.runs << ','
        << r.failures << '\n';
  }
}

nlohmann::json estimator_config_json(const EstimatorConfig& cfg) {
  nlohmann::json out;
  out["L"] = cfg.order;
  out["grid_size"] = cfg.grid_size;
  out["a"] = cfg.lepski.a;
  out["C"] = cfg.lepski.c ? nlohmann::json(*cfg.lepski.c) : nlohmann::json("auto");
  out["threshold_mult"] = cfg.lepski.threshold_mult;
  out["min_window_spacings"] = cfg.lepski.min_window_spacings;
  out["interior_norm"] = cfg.lepski.interior_norm;
  out["weights"] = cfg.lepski.weights == Weights::kGasserMuller ? "gm" : "pc";
  out["fixed_bandwidths"] = cfg.fixed_bandwidths;
  return out;
}

nlohmann::json report_json(const std::vector<ScenarioResult>& results) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    const auto& sc = r.scenario;
    nlohmann::json row;
    row["g"] = sc.g_name;
    row["f"] = sc.f_name;
    row["n"] = sc.n;
    row["i"] = sc.noise_index;
    row["T"] = sc.T;
    row["sigma"] = sc.sigma;
    row["seed"] = sc.seed;
    row["runs"] = sc.runs;
    row["failures"] = r.failures;
    row["mean"] = std::isfinite(r.mean) ? nlohmann::json(r.mean) : nlohmann::json(nullptr);
    row["std"] = r.std;
    nlohmann::json per_run = nlohmann::json::array();
    for (double m : r.run_mse) per_run.push_back(std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr));
    row["run_mse"] = per_run;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& counts : r.bandwidth_counts) {
      nlohmann::json level = nlohmann::json::array();
      for (const auto& [bw, count] : counts) level.push_back({{"bandwidth", bw}, {"count", count}});
      hist.push_back(level);
    }
    row["bandwidth_histogram"] = hist;
    row["failure_messages"] = r.failure_messages;
    row["estimator"] = estimator_config_json(sc.estimator);
    rows.push_back(row);
  }
  return {{"scenarios", rows}};
}

}  // namespace lapdeconv
