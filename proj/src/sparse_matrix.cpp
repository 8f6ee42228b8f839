#include "noda/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "noda/errors.hpp"

namespace noda {

SparseMatrix SparseMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                         std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row >= nrows || t.col >= ncols) {
      throw DimensionError("from_triplets: entry (" + std::to_string(t.row) +
                           "," + std::to_string(t.col) + ") out of bounds");
    }
    if (!std::isfinite(t.value)) {
      throw Error("from_triplets: non-finite value at (" +
                  std::to_string(t.row) + "," + std::to_string(t.col) + ")");
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseMatrix m;
  m.nrows = nrows;
  m.ncols = ncols;
  m.row_offsets.assign(nrows + 1, 0);
  m.col_indices.reserve(triplets.size());
  m.values.reserve(triplets.size());

  std::size_t i = 0;
  for (std::size_t r = 0; r < nrows; ++r) {
    m.row_offsets[r] = m.values.size();
    while (i < triplets.size() && triplets[i].row == r) {
      const std::size_t c = triplets[i].col;
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r &&
             triplets[i].col == c) {
        v += triplets[i].value;
        ++i;
      }
      if (v != 0.0) {
        m.col_indices.push_back(c);
        m.values.push_back(v);
      }
    }
  }
  m.row_offsets[nrows] = m.values.size();
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
  }
  return from_triplets(n, n, std::move(t));
}

void SparseMatrix::validate() const {
  if (row_offsets.size() != nrows + 1) {
    throw Error("validate: row_offsets length mismatch");
  }
  if (row_offsets.front() != 0 || row_offsets.back() != values.size() ||
      col_indices.size() != values.size()) {
    throw Error("validate: offset bookkeeping broken");
  }
  for (std::size_t r = 0; r < nrows; ++r) {
    if (row_offsets[r] > row_offsets[r + 1]) {
      throw Error("validate: row_offsets not nondecreasing");
    }
    for (std::size_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      if (col_indices[k] >= ncols) {
        throw Error("validate: column index out of range");
      }
      if (k > row_offsets[r] && col_indices[k - 1] >= col_indices[k]) {
        throw Error("validate: columns not strictly increasing in row " +
                    std::to_string(r));
      }
      if (values[k] == 0.0) {
        throw Error("validate: explicitly stored zero");
      }
      if (!std::isfinite(values[k])) {
        throw Error("validate: non-finite value");
      }
    }
  }
}

Vector matvec(const SparseMatrix& m, const Vector& v) {
  if (m.ncols != v.size()) {
    throw DimensionError("matvec: matrix has " + std::to_string(m.ncols) +
                         " columns, vector length " + std::to_string(v.size()));
  }
  Vector y(m.nrows, 0.0);
  for (std::size_t r = 0; r < m.nrows; ++r) {
    double s = 0.0;
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      s += m.values[k] * v[m.col_indices[k]];
    }
    y[r] = s;
  }
  return y;
}

Vector matvec_transpose(const SparseMatrix& m, const Vector& v) {
  if (m.nrows != v.size()) {
    throw DimensionError("matvec_transpose: dimension mismatch");
  }
  Vector y(m.ncols, 0.0);
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      y[m.col_indices[k]] += m.values[k] * v[r];
    }
  }
  return y;
}

double norm1(const SparseMatrix& m) {
  std::vector<double> colsum(m.ncols, 0.0);
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    colsum[m.col_indices[k]] += std::abs(m.values[k]);
  }
  double mx = 0.0;
  for (double s : colsum) {
    if (s > mx) mx = s;
  }
  return mx;
}

double norm_inf(const SparseMatrix& m) {
  double mx = 0.0;
  for (std::size_t r = 0; r < m.nrows; ++r) {
    double s = 0.0;
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      s += std::abs(m.values[k]);
    }
    if (s > mx) mx = s;
  }
  return mx;
}

SparseMatrix transpose(const SparseMatrix& m) {
  std::vector<Triplet> t;
  t.reserve(m.nnz());
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      t.push_back({m.col_indices[k], r, m.values[k]});
    }
  }
  return SparseMatrix::from_triplets(m.ncols, m.nrows, std::move(t));
}

bool is_symmetric(const SparseMatrix& m) {
  if (m.nrows != m.ncols) return false;
  const SparseMatrix mt = transpose(m);
  return mt.row_offsets == m.row_offsets && mt.col_indices == m.col_indices &&
         mt.values == m.values;
}

SparseMatrix augment(const SparseMatrix& m) {
  if (m.nrows != m.ncols) {
    throw DimensionError("augment: matrix must be square");
  }
  const std::size_t n = m.nrows;
  std::vector<Triplet> t;
  t.reserve(2 * m.nnz());
  for (std::size_t r = 0; r < m.nrows; ++r) {
    for (std::size_t k = m.row_offsets[r]; k < m.row_offsets[r + 1]; ++k) {
      const std::size_t c = m.col_indices[k];
      t.push_back({r, n + c, m.values[k]});
      t.push_back({n + c, r, m.values[k]});
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(t));
}

}  // namespace noda
