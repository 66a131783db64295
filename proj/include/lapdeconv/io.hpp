#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "lapdeconv/deconv.hpp"
#include "lapdeconv/sim.hpp"

namespace lapdeconv {

struct SeriesCsv {
  std::vector<double> t;
  std::vector<double> y;
};

/// Reads a CSV with header `t,y`. Throws InputError on a missing header,
/// malformed or non-finite fields, or unsorted t.
SeriesCsv read_series_csv(std::istream& in);
SeriesCsv read_series_csv(const std::string& path);

/// Shortest round-trip-safe form: 17 significant digits.
std::string format_double(double x);

void write_columns_csv(std::ostream& out, const std::string& header_a, const std::string& header_b,
                       const std::vector<double>& a, const std::vector<double>& b);

/// One row per scenario: g,f,n,i,mean,std,runs,failures.
void write_report_csv(std::ostream& out, const std::vector<ScenarioResult>& results);
nlohmann::json report_json(const std::vector<ScenarioResult>& results);

nlohmann::json estimator_config_json(const EstimatorConfig& cfg);

}  // namespace lapdeconv
