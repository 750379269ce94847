#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "confound/core.hpp"

namespace confound::cli {

enum class ColumnType { automatic, numerical, categorical };

struct TypeOverrides {
  ColumnType y = ColumnType::automatic;
  ColumnType yhat = ColumnType::automatic;
  ColumnType c = ColumnType::automatic;
};

struct DelimitedTable {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma- or tab-separated text with a header row. The delimiter is a tab if
/// the header line contains one, a comma otherwise. Double-quoted fields may
/// contain delimiters and doubled quotes.
DelimitedTable read_delimited(std::istream& in);
DelimitedTable read_delimited_file(const std::filesystem::path& path);

/// Empty, NA, NaN, null (any case) after trimming.
bool is_missing(std::string_view field);

/// Strict decimal/scientific parse of a whole (trimmed) field.
bool parse_number(std::string_view field, double& out);

struct IngestResult {
  Triplet triplet;
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;
  std::array<std::string, 3> columns;  // y, yhat, c
};

/// Reads the three named columns, drops rows where any of them is missing,
/// infers each column's kind (numerical if every kept entry parses as a number)
/// unless overridden, and validates the result.
IngestResult ingest_table(const std::filesystem::path& path, const std::string& y_col,
                          const std::string& yhat_col, const std::string& c_col,
                          const TypeOverrides& types = {});

IngestResult ingest_table(const DelimitedTable& table, const std::string& y_col,
                          const std::string& yhat_col, const std::string& c_col,
                          const TypeOverrides& types = {});

/// Rank-based inverse normal transform: x_i -> Phi^{-1}((rank_i - 0.5) / n),
/// average ranks for ties.
std::vector<double> quantile_transform_normal(std::span<const double> x);

}  // namespace confound::cli
