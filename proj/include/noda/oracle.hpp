#pragma once

#include <cstddef>
#include <vector>

#include "noda/sparse_matrix.hpp"
#include "noda/vector_ops.hpp"

namespace noda::oracle {

/// Row-major dense matrix, used only for brute-force reference computations
/// on small instances.
struct DenseMatrix {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : nrows(r), ncols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * ncols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * ncols + j]; }
};

DenseMatrix densify(const SparseMatrix& m);

// Partial-pivoting LU solve. Throws SingularMatrix when a pivot collapses.
Vector dense_lu_solve(const DenseMatrix& a, const Vector& b);

// Determinant via LU (sign times pivot product).
double dense_determinant(const DenseMatrix& a);

// Columnwise LU solves against the identity. Guarded to n <= 512 (SizeGuard).
DenseMatrix dense_inverse(const DenseMatrix& a);

struct PerronResult {
  double rho = 0.0;
  Vector v;
  std::size_t iterations = 0;
};

// Power iteration for the Perron root of a nonnegative irreducible matrix.
// Internally iterates on B + I (handles cyclic matrices; shifts rho by
// exactly one) until the Collatz-Wielandt bracket max(Bv/v) - min(Bv/v)
// collapses to 1e-12 relative. Throws NoConvergence after 1e6 iterations.
PerronResult perron_power(const DenseMatrix& b);

// 1 / rho(A^{-1}) via densify + invert + perron_power. Guarded to n <= 512.
double sigma_min_oracle(const SparseMatrix& a);

}  // namespace noda::oracle
