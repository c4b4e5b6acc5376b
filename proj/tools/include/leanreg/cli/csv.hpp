#pragma once

// Comma-separated numeric tables with a header row. Quoting is not supported;
// cells are trimmed of surrounding blanks and parsed as finite doubles.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "leanreg/ols.hpp"

namespace leanreg::cli {

struct CsvData {
  Dataset data;
  std::vector<std::string> x_names;  // "(intercept)" first when one was prepended
  std::string response;
};

/// The response column becomes y; every other column becomes x in header order.
/// Throws missing_column, non_numeric_cell (row and column reported), empty_data.
CsvData read_csv(std::istream& in, std::string_view response, bool add_intercept);
CsvData read_csv(const std::filesystem::path& path, std::string_view response,
                 bool add_intercept);

/// Response first, then the covariates; shortest round-trip decimals.
void write_csv(std::ostream& out, const CsvData& table);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace leanreg::cli
