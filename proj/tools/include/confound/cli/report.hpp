#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "confound/confoundtest.hpp"

namespace confound::cli {

using Json = nlohmann::ordered_json;

/// Everything needed to reproduce and interpret one test run.
struct Report {
  std::string test_kind;
  double p_value = 1.0;
  double t_observed = 0.0;
  std::string t_family;
  double r2_y_c = 0.0;
  double p_y_c = 1.0;
  double r2_yhat_c = 0.0;
  double p_yhat_c = 1.0;
  double r2_yhat_y = 0.0;
  double p_yhat_y = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t mcmc_steps = 0;
  std::uint64_t seed = 0;
  std::string p_mode;
  std::string density;
  double alpha = 0.05;
  bool reject = false;
  std::string y_col;
  std::string yhat_col;
  std::string c_col;
  std::string quantile_normal = "none";
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;
  double duration_seconds = 0.0;
  std::string version;
  std::vector<double> t_null;

  bool operator==(const Report&) const = default;
};

Json to_json(const Report& report);
Report report_from_json(const Json& j);

/// Parses either a single report object or an array of them.
std::vector<Report> parse_reports(const std::string& text);
std::string dump_reports(const std::vector<Report>& reports);

/// Aligned key/value listing; numbers printed with 15 significant digits.
void write_text(std::ostream& out, const std::vector<Report>& reports);

std::string verdict_line(const Report& report);

std::string format_number(double value);

}  // namespace confound::cli
