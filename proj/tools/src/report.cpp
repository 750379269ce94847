#include "confound/cli/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

namespace confound::cli {

Json to_json(const Report& r) {
  Json j;
  j["test_kind"] = r.test_kind;
  j["p_value"] = r.p_value;
  j["t_observed"] = r.t_observed;
  j["t_family"] = r.t_family;
  j["r2_y_c"] = r.r2_y_c;
  j["p_y_c"] = r.p_y_c;
  j["r2_yhat_c"] = r.r2_yhat_c;
  j["p_yhat_c"] = r.p_yhat_c;
  j["r2_yhat_y"] = r.r2_yhat_y;
  j["p_yhat_y"] = r.p_yhat_y;
  j["n"] = r.n;
  j["m"] = r.m;
  j["mcmc_steps"] = r.mcmc_steps;
  j["seed"] = r.seed;
  j["p_mode"] = r.p_mode;
  j["density"] = r.density;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  j["columns"] = Json{{"y", r.y_col}, {"yhat", r.yhat_col}, {"c", r.c_col}};
  j["quantile_normal"] = r.quantile_normal;
  j["rows_read"] = r.rows_read;
  j["dropped_rows"] = r.dropped_rows;
  j["duration_seconds"] = r.duration_seconds;
  j["version"] = r.version;
  j["t_null"] = r.t_null;
  return j;
}

Report report_from_json(const Json& j) {
  Report r;
  j.at("test_kind").get_to(r.test_kind);
  j.at("p_value").get_to(r.p_value);
  j.at("t_observed").get_to(r.t_observed);
  j.at("t_family").get_to(r.t_family);
  j.at("r2_y_c").get_to(r.r2_y_c);
  j.at("p_y_c").get_to(r.p_y_c);
  j.at("r2_yhat_c").get_to(r.r2_yhat_c);
  j.at("p_yhat_c").get_to(r.p_yhat_c);
  j.at("r2_yhat_y").get_to(r.r2_yhat_y);
  j.at("p_yhat_y").get_to(r.p_yhat_y);
  j.at("n").get_to(r.n);
  j.at("m").get_to(r.m);
  j.at("mcmc_steps").get_to(r.mcmc_steps);
  j.at("seed").get_to(r.seed);
  j.at("p_mode").get_to(r.p_mode);
  j.at("density").get_to(r.density);
  j.at("alpha").get_to(r.alpha);
  j.at("reject").get_to(r.reject);
  const Json& cols = j.at("columns");
  cols.at("y").get_to(r.y_col);
  cols.at("yhat").get_to(r.yhat_col);
  cols.at("c").get_to(r.c_col);
  j.at("quantile_normal").get_to(r.quantile_normal);
  j.at("rows_read").get_to(r.rows_read);
  j.at("dropped_rows").get_to(r.dropped_rows);
  j.at("duration_seconds").get_to(r.duration_seconds);
  j.at("version").get_to(r.version);
  j.at("t_null").get_to(r.t_null);
  return r;
}

std::vector<Report> parse_reports(const std::string& text) {
  const Json j = Json::parse(text);
  std::vector<Report> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(report_from_json(item));
  } else {
    out.push_back(report_from_json(j));
  }
  return out;
}

std::string dump_reports(const std::vector<Report>& reports) {
  if (reports.size() == 1) return to_json(reports.front()).dump(2) + "\n";
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

std::string verdict_line(const Report& r) {
  const std::string h0 = r.test_kind == "partial"
                             ? "yhat independent of c given y"
                             : "yhat independent of y given c";
  return r.test_kind + " confounder test: p = " + format_number(r.p_value) +
         (r.reject ? " <= " : " > ") + "alpha = " + format_number(r.alpha) + ", " +
         (r.reject ? "reject H0 (" : "do not reject H0 (") + h0 + ")";
}

void write_text(std::ostream& out, const std::vector<Report>& reports) {
  bool first = true;
  for (const auto& r : reports) {
    if (!first) out << '\n';
    first = false;
    const auto row = [&out](const char* key, const std::string& value) {
      out << std::left << std::setw(18) << key << value << '\n';
    };
    row("test_kind", r.test_kind);
    row("p_value", format_number(r.p_value));
    row("t_observed", format_number(r.t_observed));
    row("t_family", r.t_family);
    row("r2_y_c", format_number(r.r2_y_c));
    row("p_y_c", format_number(r.p_y_c));
    row("r2_yhat_c", format_number(r.r2_yhat_c));
    row("p_yhat_c", format_number(r.p_yhat_c));
    row("r2_yhat_y", format_number(r.r2_yhat_y));
    row("p_yhat_y", format_number(r.p_yhat_y));
    row("n", std::to_string(r.n));
    row("m", std::to_string(r.m));
    row("mcmc_steps", std::to_string(r.mcmc_steps));
    row("seed", std::to_string(r.seed));
    row("p_mode", r.p_mode);
    row("density", r.density);
    row("alpha", format_number(r.alpha));
    row("columns", r.y_col + "," + r.yhat_col + "," + r.c_col);
    row("quantile_normal", r.quantile_normal);
    row("rows_read", std::to_string(r.rows_read));
    row("dropped_rows", std::to_string(r.dropped_rows));
    row("duration_seconds", format_number(r.duration_seconds));
    row("version", r.version);
    row("verdict", verdict_line(r));
  }
}

}  // namespace confound::cli
