#pragma once

// Plain-text CSV for matrices and vectors: one row per line, decimal reals,
// no header. Values are written with 17 significant digits so that a
// write/read cycle reproduces every double exactly.

#include "irlscs/numkernel.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace irlscs {

// Carries "<source>:<line>: <reason>".
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip-safe rendering used across all CSV outputs.
std::string format_real(double value);

DenseMatrix parse_matrix_csv(std::istream& in, const std::string& source);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

// Accepts a single column or a single row.
RealVector read_vector_csv(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const DenseMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

// One entry per line.
void write_vector_csv(std::ostream& out, const RealVector& v);
void write_vector_csv(const std::filesystem::path& path, const RealVector& v);

}  // namespace irlscs
