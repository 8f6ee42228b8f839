#pragma once

#include <cstddef>
#include <vector>

#include "noda/vector_ops.hpp"

namespace noda {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse-row matrix with sorted, duplicate-free columns per row
/// and no explicitly stored zeros. Immutable by convention once built; all
/// operations below treat it as read-only.
struct SparseMatrix {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<std::size_t> row_offsets;  // length nrows + 1
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  // Canonicalizes: sorts by (row, col), sums duplicates, drops exact zeros.
  static SparseMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                    std::vector<Triplet> triplets);

  static SparseMatrix identity(std::size_t n);

  std::size_t nnz() const { return values.size(); }

  // Throws Error if any CSR invariant is broken.
  void validate() const;
};

// y = m * v with deterministic ascending-column summation per row.
Vector matvec(const SparseMatrix& m, const Vector& v);

// y = m^T * v (row-major traversal, deterministic).
Vector matvec_transpose(const SparseMatrix& m, const Vector& v);

// Matrix norms: 1-norm is the max column absolute sum, inf-norm the max row
// absolute sum. The matrix 2-norm is deliberately not provided.
double norm1(const SparseMatrix& m);
double norm_inf(const SparseMatrix& m);

SparseMatrix transpose(const SparseMatrix& m);

bool is_symmetric(const SparseMatrix& m);

// The 2n x 2n symmetric block matrix [0 M; M^T 0].
SparseMatrix augment(const SparseMatrix& m);

}  // namespace noda
