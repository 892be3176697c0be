/*
 Copyright 2026 The conic-newton Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef CONIC_NEWTON_IO_HPP
#define CONIC_NEWTON_IO_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "conic_newton/common.hpp"

namespace conic::io {

enum class MatrixFormat { MatrixMarketArray, MatrixMarketCoordinateSymmetric, Csv };

inline MatrixFormat format_from_path(const std::string& path) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  return ends_with(".csv") ? MatrixFormat::Csv : MatrixFormat::MatrixMarketArray;
}

namespace detail {

inline std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline double parse_double(const std::string& tok, const std::string& path, std::size_t line) {
  const std::string t = trim(tok);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last) {
    throw InvalidInput(where(path, line) + "cannot parse number '" + t + "'");
  }
  if (!std::isfinite(v)) throw InvalidInput(where(path, line) + "non-finite value '" + t + "'");
  return v;
}

inline long parse_index(const std::string& tok, const std::string& path, std::size_t line) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw InvalidInput(where(path, line) + "cannot parse index '" + tok + "'");
  }
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Matrix read_matrix_market(std::istream& in, const std::string& path, const std::string& header) {
  const auto h = split_ws(lower(header));
  if (h.size() != 5 || h[1] != "matrix") throw InvalidInput(where(path, 1) + "malformed MatrixMarket header");
  const std::string& layout = h[2];
  const std::string& field = h[3];
  const std::string& symmetry = h[4];
  if (field != "real" && field != "double" && field != "integer") {
    throw InvalidInput(where(path, 1) + "unsupported MatrixMarket field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw InvalidInput(where(path, 1) + "unsupported MatrixMarket symmetry '" + symmetry + "'");
  }
  if (layout != "array" && layout != "coordinate") {
    throw InvalidInput(where(path, 1) + "unsupported MatrixMarket layout '" + layout + "'");
  }
  const bool symmetric = symmetry == "symmetric";

  std::string line;
  std::size_t lineno = 1;
  std::vector<std::string> size_tokens;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    size_tokens = split_ws(t);
    break;
  }
  const std::size_t expected_size_tokens = layout == "array" ? 2 : 3;
  if (size_tokens.size() != expected_size_tokens) throw InvalidInput(where(path, lineno) + "malformed size line");
  const long rows = parse_index(size_tokens[0], path, lineno);
  const long cols = parse_index(size_tokens[1], path, lineno);
  if (symmetric && rows != cols) throw InvalidInput(where(path, lineno) + "symmetric matrix must be square");
  Matrix m = Matrix::Zero(rows, cols);

  if (layout == "array") {
    long col = 0, row = 0;
    long count = 0;
    const long total = symmetric ? rows * (rows + 1) / 2 : rows * cols;
    while (count < total && std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '%') continue;
      const auto toks = split_ws(t);
      for (const auto& tok : toks) {
        if (count >= total) throw InvalidInput(where(path, lineno) + "too many entries");
        const double v = parse_double(tok, path, lineno);
        m(row, col) = v;
        if (symmetric) m(col, row) = v;
        ++count;
        if (++row == rows) {
          ++col;
          row = symmetric ? col : 0;
        }
      }
    }
    if (count != total) throw InvalidInput(where(path, lineno) + "expected " + std::to_string(total) + " entries, found " + std::to_string(count));
  } else {
    const long nnz = parse_index(size_tokens[2], path, lineno);
    long count = 0;
    while (count < nnz && std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '%') continue;
      const auto toks = split_ws(t);
      if (toks.size() != 3) throw InvalidInput(where(path, lineno) + "expected 'row col value'");
      const long i = parse_index(toks[0], path, lineno);
      const long j = parse_index(toks[1], path, lineno);
      if (i < 1 || i > rows || j < 1 || j > cols) throw InvalidInput(where(path, lineno) + "index out of range");
      if (symmetric && i < j) throw InvalidInput(where(path, lineno) + "symmetric storage expects the lower triangle");
      const double v = parse_double(toks[2], path, lineno);
      m(i - 1, j - 1) = v;
      if (symmetric) m(j - 1, i - 1) = v;
      ++count;
    }
    if (count != nnz) throw InvalidInput(where(path, lineno) + "expected " + std::to_string(nnz) + " entries, found " + std::to_string(count));
  }
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (!t.empty() && t[0] != '%') throw InvalidInput(where(path, lineno) + "unexpected trailing data");
  }
  return m;
}

inline Matrix read_csv(std::istream& in, const std::string& path, std::string first_line) {
  std::vector<std::vector<double>> rows;
  std::string line = std::move(first_line);
  std::size_t lineno = 1;
  bool have = true;
  while (have) {
    const std::string t = trim(line);
    if (!t.empty() && t[0] != '#') {
      std::vector<double> row;
      std::string cell;
      std::istringstream cells(t);
      while (std::getline(cells, cell, ',')) row.push_back(parse_double(cell, path, lineno));
      if (!t.empty() && t.back() == ',') throw InvalidInput(where(path, lineno) + "trailing comma");
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw InvalidInput(where(path, lineno) + "expected " + std::to_string(rows.front().size()) + " columns, found " + std::to_string(row.size()));
      }
      rows.push_back(std::move(row));
    }
    have = static_cast<bool>(std::getline(in, line));
    ++lineno;
  }
  if (rows.empty()) throw InvalidInput(path + ": empty CSV file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace detail

/// Reads a MatrixMarket (array or coordinate, general or symmetric) or CSV
/// file; the format is detected from the first line.
inline Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::string first;
  if (!std::getline(in, first)) throw InvalidInput(path + ": empty file");
  if (detail::lower(first).rfind("%%matrixmarket", 0) == 0) return detail::read_matrix_market(in, path, first);
  return detail::read_csv(in, path, first);
}

/// Reads a matrix and symmetrizes it; warns when the asymmetry exceeds 1e-9 |G|.
inline Matrix read_symmetric_matrix(const std::string& path, std::vector<std::string>* warnings = nullptr) {
  Matrix m = read_matrix(path);
  if (m.rows() != m.cols()) throw InvalidInput(path + ": matrix must be square");
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-9 * m.norm() && warnings) {
    warnings->push_back(path + ": input is not symmetric (|G - G^T| = " + detail::format_double(asym) + "), symmetrized");
  }
  return 0.5 * (m + m.transpose());
}

/// Column or row vector file.
inline Vector read_vector(const std::string& path) {
  Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw InvalidInput(path + ": expected a single row or column, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void write_matrix(std::ostream& os, const Matrix& m, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::MatrixMarketArray:
      os << "%%MatrixMarket matrix array real general\n" << m.rows() << " " << m.cols() << "\n";
      for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) os << detail::format_double(m(i, j)) << "\n";
      break;
    case MatrixFormat::MatrixMarketCoordinateSymmetric: {
      if (m.rows() != m.cols()) throw InvalidInput("symmetric coordinate output needs a square matrix");
      const Index n = m.rows();
      os << "%%MatrixMarket matrix coordinate real symmetric\n" << n << " " << n << " " << n * (n + 1) / 2 << "\n";
      for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) os << i + 1 << " " << j + 1 << " " << detail::format_double(m(i, j)) << "\n";
      break;
    }
    case MatrixFormat::Csv:
      for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << detail::format_double(m(i, j));
        os << "\n";
      }
      break;
  }
}

inline void write_matrix(const std::string& path, const Matrix& m, MatrixFormat format) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write '" + path + "'");
  write_matrix(os, m, format);
  if (!os) throw InvalidInput("error writing '" + path + "'");
}

inline void write_matrix(const std::string& path, const Matrix& m) { write_matrix(path, m, format_from_path(path)); }

}  // namespace conic::io

#endif  // CONIC_NEWTON_IO_HPP
