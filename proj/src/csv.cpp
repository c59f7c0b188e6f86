#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "clusterkriging/bench.hpp"
#include "clusterkriging/error.hpp"

namespace ck {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  for (auto& s : cells) {
    const auto first = s.find_first_not_of(" \t\"");
    const auto last = s.find_last_not_of(" \t\"");
    s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
  }
  return cells;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::optional<std::string>& target_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  const std::vector<std::string> header = split_line(line);
  const std::size_t columns = header.size();
  if (columns < 2) throw InputError(path + ": need at least one feature column and a target column");

  std::size_t target = columns - 1;
  if (target_column) {
    target = columns;
    for (std::size_t c = 0; c < columns; ++c) {
      if (header[c] == *target_column) target = c;
    }
    if (target == columns) throw InputError(path + ": no column named '" + *target_column + "'");
  }

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != columns) {
      throw InputError(path + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(columns));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw InputError(path + ": non-numeric value '" + cells[c] + "' at row " + std::to_string(rows + 1) +
                         " (line " + std::to_string(line_no) + "), column '" + header[c] + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError(path + ": no data rows");

  const Index n = static_cast<Index>(rows);
  Matrix x(n, static_cast<Index>(columns - 1));
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    Index k = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      const double v = values[static_cast<std::size_t>(i) * columns + c];
      if (c == target) {
        y(i) = v;
      } else {
        x(i, k++) = v;
      }
    }
  }
  return Dataset(std::move(x), std::move(y));
}

void write_csv(const Dataset& data, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw IoError("cannot open '" + path + "' for writing");
  for (Index k = 0; k < data.dim(); ++k) std::fprintf(f, "x%td,", static_cast<std::ptrdiff_t>(k));
  std::fprintf(f, "y\n");
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < data.dim(); ++k) std::fprintf(f, "%.17g,", data.x()(i, k));
    std::fprintf(f, "%.17g\n", data.y()(i));
  }
  const bool ok = std::ferror(f) == 0;
  if (std::fclose(f) != 0 || !ok) throw IoError("failed writing '" + path + "'");
}

}  // namespace ck
