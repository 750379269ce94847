#include "confound/cli/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <boost/math/distributions/normal.hpp>

#include "confound/stats.hpp"

namespace confound::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(const std::string& line, char delimiter, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted)
    throw Error(ErrorCode::ParseError, "unterminated quote on line " + std::to_string(line_no));
  fields.push_back(std::move(field));
  return fields;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (trim(header[k]) == name) return k;
  throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found in header");
}

Variable build_variable(const std::vector<std::string_view>& fields, ColumnType type,
                        const std::string& name, const std::vector<std::size_t>& line_numbers) {
  std::vector<double> numbers(fields.size());
  bool numeric = type != ColumnType::categorical;
  if (numeric) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], numbers[i])) {
        if (type == ColumnType::numerical)
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_numbers[i]) +
                                                 ", column '" + name + "': '" +
                                                 std::string(fields[i]) + "' is not a number");
        numeric = false;
        break;
      }
    }
  }
  if (numeric) return Variable::numerical(std::move(numbers));
  std::vector<std::string> labels(fields.begin(), fields.end());
  return Variable::categorical(labels);
}

}  // namespace

bool is_missing(std::string_view field) {
  field = trim(field);
  if (field.empty()) return true;
  std::string lower(field);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return lower == "na" || lower == "nan" || lower == "null";
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

DelimitedTable read_delimited(std::istream& in) {
  DelimitedTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (table.header.empty()) {
      if (trim(line).empty()) continue;
      table.delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
      table.header = split_line(line, table.delimiter, line_no);
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split_line(line, table.delimiter, line_no);
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected " +
                                             std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw Error(ErrorCode::ParseError, "input has no header row");
  return table;
}

DelimitedTable read_delimited_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
  return read_delimited(in);
}

IngestResult ingest_table(const DelimitedTable& table, const std::string& y_col,
                          const std::string& yhat_col, const std::string& c_col,
                          const TypeOverrides& types) {
  const std::array<std::size_t, 3> idx = {find_column(table.header, y_col),
                                          find_column(table.header, yhat_col),
                                          find_column(table.header, c_col)};
  IngestResult result;
  result.columns = {y_col, yhat_col, c_col};
  result.rows_read = table.rows.size();

  std::array<std::vector<std::string_view>, 3> kept;
  std::vector<std::size_t> line_numbers;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (std::any_of(idx.begin(), idx.end(), [&](std::size_t k) { return is_missing(row[k]); })) {
      ++result.dropped_rows;
      continue;
    }
    for (std::size_t v = 0; v < 3; ++v) kept[v].push_back(trim(row[idx[v]]));
    line_numbers.push_back(r + 2);
  }

  const std::array<ColumnType, 3> kinds = {types.y, types.yhat, types.c};
  const Variable y = build_variable(kept[0], kinds[0], y_col, line_numbers);
  const Variable yhat = build_variable(kept[1], kinds[1], yhat_col, line_numbers);
  const Variable c = build_variable(kept[2], kinds[2], c_col, line_numbers);
  result.triplet = validate_triplet(y, yhat, c);
  return result;
}

IngestResult ingest_table(const std::filesystem::path& path, const std::string& y_col,
                          const std::string& yhat_col, const std::string& c_col,
                          const TypeOverrides& types) {
  return ingest_table(read_delimited_file(path), y_col, yhat_col, c_col, types);
}

std::vector<double> quantile_transform_normal(std::span<const double> x) {
  if (x.size() < kMinRows)
    throw Error(ErrorCode::TooFewRows, "quantile transform needs at least " +
                                           std::to_string(kMinRows) + " values");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateVariable, "cannot transform a constant vector");

  const auto ranks = average_ranks(x);
  const double n = static_cast<double>(x.size());
  const boost::math::normal standard;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = boost::math::quantile(standard, (ranks[i] - 0.5) / n);
  return out;
}

}  // namespace confound::cli
