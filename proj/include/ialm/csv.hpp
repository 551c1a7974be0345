#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ialm/core.hpp"

// Instance file format: a pair <base>.A.csv / <base>.b.csv holding the
// dense matrix (one observation per row, comma separated, no header)
// and the right-hand side (one value per row).  Values are written with
// 17 significant digits so a write/load round trip is bit exact.

namespace ialm {

struct RawInstance {
  Matrix A;
  Vector b;
};

namespace detail {

inline double parse_cell(const std::string& cell, const std::string& path,
                         long line) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' ||
                          *(end - 1) == '\r'))
    --end;
  if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading +
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end)
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": non-numeric cell '" + cell + "'");
  return value;
}

inline std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Matrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(detail::parse_cell(cell, path, lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": ragged row (" + std::to_string(row.size()) +
                               " cells, expected " +
                               std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty file");

  Matrix out(static_cast<Index>(rows.size()),
             static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

inline RawInstance load_csv_instance(const std::string& base) {
  RawInstance raw;
  raw.A = load_csv_matrix(base + ".A.csv");
  const Matrix bmat = load_csv_matrix(base + ".b.csv");
  if (bmat.cols() != 1)
    throw std::runtime_error(base + ".b.csv: expected a single column, got " +
                             std::to_string(bmat.cols()));
  raw.b = bmat.col(0);
  if (raw.b.size() != raw.A.rows())
    throw std::runtime_error(base + ": row-count mismatch between A (" +
                             std::to_string(raw.A.rows()) + ") and b (" +
                             std::to_string(raw.b.size()) + ")");
  return raw;
}

inline void save_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_cell(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void save_csv_instance(const std::string& base, const Matrix& A,
                              const Vector& b) {
  save_csv_matrix(base + ".A.csv", A);
  save_csv_matrix(base + ".b.csv", b);
}

}  // namespace ialm
