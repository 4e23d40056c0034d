#include "blocksel/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace blocksel {

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line, long col,
                             const std::string& what) {
  std::ostringstream ss;
  ss << path << ":" << line << ":" << col << ": " << what;
  fail(ErrorCode::parse_error, ss.str());
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // skip blank lines
    if (line.find_first_not_of(" \t,") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    int col = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      std::string cell = line.substr(pos, next - pos);
      ++col;
      const char* begin = cell.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && *end == ' ') ++end;
      if (end == begin || (end && *end != '\0') || errno == ERANGE)
        parse_fail(path, lineno, col, "expected a number, got '" + cell + "'");
      row.push_back(v);
      pos = next + 1;
      if (next == line.size()) break;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::parse_error, path + ": no data rows");
  return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  const auto rows = read_rows(path);
  const std::size_t cols = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      parse_fail(path, static_cast<long>(r + 1), 1,
                 "row has " + std::to_string(rows[r].size()) +
                     " columns, expected " + std::to_string(cols));
  }
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  return m;
}

Vector read_csv_vector(const std::string& path) {
  const auto rows = read_rows(path);
  std::vector<double> flat;
  for (const auto& row : rows)
    for (double v : row) flat.push_back(v);
  if (rows.size() > 1 && rows.front().size() > 1)
    fail(ErrorCode::parse_error,
         path + ": expected a single column or a single row");
  Vector out(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) out[i] = flat[i];
  return out;
}

std::vector<int> read_csv_ints(const std::string& path) {
  const Vector v = read_csv_vector(path);
  std::vector<int> out(v.size());
  for (long i = 0; i < v.size(); ++i) {
    const double rounded = std::round(v[i]);
    if (std::abs(v[i] - rounded) > 1e-9)
      fail(ErrorCode::parse_error,
           path + ": entry " + std::to_string(i + 1) + " is not an integer");
    out[i] = static_cast<int>(rounded);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorCode::io_error, "write failed for " + path);
}

std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream ss;
  ss.precision(17);
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      if (c) ss << ',';
      ss << m(r, c);
    }
    ss << '\n';
  }
  return ss.str();
}

}  // namespace blocksel
