#include "irlscs/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace irlscs {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& source, std::size_t line,
                       const std::string& reason) {
  throw CsvError(source + ":" + std::to_string(line) + ": " + reason);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CsvError(path.string() + ": cannot open for writing");
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

DenseMatrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string_view line = trim(text);
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view field = trim(line.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start));
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() ||
          ptr != field.data() + field.size()) {
        fail(source, line_no,
             "field " + std::to_string(row.size() + 1) + " '" +
                 std::string(field) + "' is not a decimal real");
      }
      if (!std::isfinite(value)) {
        fail(source, line_no,
             "field " + std::to_string(row.size() + 1) + " is not finite");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(source, line_no,
           "ragged row: " + std::to_string(row.size()) + " fields, expected " +
               std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(source, line_no, "no data rows");

  DenseMatrix m(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path.string() + ": cannot open for reading");
  return parse_matrix_csv(in, path.string());
}

RealVector read_vector_csv(const std::filesystem::path& path) {
  const DenseMatrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw CsvError(path.string() + ": expected a single row or column, got " +
                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_for_write(path);
  write_matrix_csv(out, m);
}

void write_vector_csv(std::ostream& out, const RealVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v[i]) << '\n';
}

void write_vector_csv(const std::filesystem::path& path, const RealVector& v) {
  auto out = open_for_write(path);
  write_vector_csv(out, v);
}

}  // namespace irlscs
