#pragma once

#include <string>

#include "noda/sparse_matrix.hpp"

namespace noda {

// Reads a Matrix Market coordinate file (real or integer, general or
// symmetric). Symmetric storage is expanded to full storage, duplicates are
// summed. Throws ParseError with a line number on malformed input and
// UnsupportedFormat for pattern/complex fields or array format.
SparseMatrix read_matrix_market(const std::string& path);

// Writes coordinate/real/general with 1-based indices and 17 significant
// digits, so a read-back reproduces the matrix exactly.
void write_matrix_market(const SparseMatrix& m, const std::string& path);

}  // namespace noda
