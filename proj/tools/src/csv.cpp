#include "leanreg/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "leanreg/error.hpp"

namespace leanreg::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

CsvData read_csv(std::istream& in, std::string_view response, bool add_intercept) {
  std::string line;
  if (!std::getline(in, line) || blank(line)) {
    throw Error(ErrorCode::empty_data, "CSV input has no header row");
  }
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (std::string_view h : split(line)) header.emplace_back(h);
  std::size_t response_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response) response_col = c;
  }
  if (response_col == header.size()) {
    throw Error(ErrorCode::missing_column,
                "response column '" + std::string(response) + "' not found in header");
  }

  CsvData out;
  out.response = std::string(response);
  if (add_intercept) out.x_names.emplace_back("(intercept)");
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_col) out.x_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::non_numeric_cell,
                  "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string_view cell = cells[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw Error(ErrorCode::non_numeric_cell,
                    "line " + std::to_string(line_no) + ", column '" + header[c] +
                        "': '" + std::string(cell) + "' is not a finite number");
      }
      row[c] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::empty_data, "CSV input has no data rows");

  const std::size_t p = out.x_names.size();
  out.data = Dataset{Mat(rows.size(), p), Vec(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t j = 0;
    if (add_intercept) out.data.x(i, j++) = 1.0;
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c == response_col) out.data.y[i] = rows[i][c];
      else out.data.x(i, j++) = rows[i][c];
    }
  }
  return out;
}

CsvData read_csv(const std::filesystem::path& path, std::string_view response,
                 bool add_intercept) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::empty_data, "cannot open data file " + path.string());
  return read_csv(in, response, add_intercept);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_csv(std::ostream& out, const CsvData& table) {
  out << table.response;
  for (const auto& name : table.x_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.data.n(); ++i) {
    out << format_double(table.data.y[i]);
    for (std::size_t j = 0; j < table.data.p(); ++j) out << ',' << format_double(table.data.x(i, j));
    out << '\n';
  }
}

}  // namespace leanreg::cli
