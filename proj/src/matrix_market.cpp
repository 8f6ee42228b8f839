#include "noda/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "noda/errors.hpp"

namespace noda {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// getline keeps the \r of CRLF files; strip it so token parsing works.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open matrix file: " + path);
  }

  std::string line;
  std::size_t lineno = 0;

  if (!next_line(in, line)) {
    throw ParseError("empty file", 1);
  }
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") {
    throw ParseError("missing %%MatrixMarket banner", lineno);
  }
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "coordinate") {
    throw UnsupportedFormat("only coordinate matrices are supported");
  }
  if (field == "complex" || field == "pattern") {
    throw UnsupportedFormat("unsupported field: " + field);
  }
  if (field != "real" && field != "integer") {
    throw UnsupportedFormat("unknown field: " + field);
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw UnsupportedFormat("unsupported symmetry: " + symmetry);
  }

  // Skip comments, then read the size line.
  std::size_t nrows = 0, ncols = 0, nnz = 0;
  bool have_size = false;
  while (next_line(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream sz(line);
    if (!(sz >> nrows >> ncols >> nnz)) {
      throw ParseError("malformed size line", lineno);
    }
    have_size = true;
    break;
  }
  if (!have_size) {
    throw ParseError("missing size line", lineno);
  }

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * nnz : nnz);
  std::size_t seen = 0;
  while (seen < nnz) {
    if (!next_line(in, line)) {
      throw ParseError("unexpected end of file, expected " +
                           std::to_string(nnz) + " entries",
                       lineno);
    }
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream es(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(es >> i >> j >> v)) {
      throw ParseError("malformed entry", lineno);
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > nrows ||
        static_cast<std::size_t>(j) > ncols) {
      throw ParseError("index out of range", lineno);
    }
    const std::size_t r = static_cast<std::size_t>(i - 1);
    const std::size_t c = static_cast<std::size_t>(j - 1);
    triplets.push_back({r, c, v});
    if (symmetric && r != c) {
      triplets.push_back({c, r, v});
    }
    ++seen;
  }

  return SparseMatrix::from_triplets(nrows, ncols, std::move(triplets));
}

void write_matrix_market(const SparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open file for writing: " + path);
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.nrows << " " << m.ncols << " " << m.nnz() << "\n";
  char buf[64];
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.values[k]);
      out << (r + 1) << " " << (m.col_indices[k] + 1) << " " << buf << "\n";
    }
  }
  if (!out) {
    throw Error("write failed: " + path);
  }
}

}  // namespace noda
